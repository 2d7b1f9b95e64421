"""Time the compiled core against the numpy fallback.

    python3 benchmarks/bench_core.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from lpimprove import _backend, _fallback
from lpimprove.kernels import monomial_kernel, prime_kernel
from lpimprove.primes import _base_primes

try:
    from lpimprove import _core
except ImportError:
    _core = None


def cases():
    rng = np.random.default_rng(0)
    for d, N in ((2, 64), (2, 512), (3, 64)):
        K = monomial_kernel(d, N).values
        f = rng.random(4096)
        yield f"convolve x^{d} N={N} len(f)=4096", "direct_convolve", (f, K)
    K = prime_kernel(10_000).values
    yield "convolve primes N=1e4 len(f)=4096", "direct_convolve", (rng.random(4096), K)
    lo, hi = 10**8, 10**8 + (1 << 23)
    base = _base_primes(int(hi**0.5) + 1)
    yield "sieve segment 2^23 at 1e8", "sieve_odd_segment", (lo + 1, hi, base)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"active backend: {_backend.IMPLEMENTATION}")
    if _core is None:
        print("compiled core not built; only the fallback is timed")
    print(f"{'case':40s} {'fallback s':>11s} {'compiled s':>11s} {'speedup':>8s}")
    for label, name, fn_args in cases():
        slow = min(timeit.repeat(lambda: getattr(_fallback, name)(*fn_args),
                                 number=1, repeat=args.repeat))
        if _core is None:
            print(f"{label:40s} {slow:11.4f} {'-':>11s} {'-':>8s}")
            continue
        a = getattr(_fallback, name)(*fn_args)
        b = getattr(_core, name)(*fn_args)
        assert np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-12), label
        fast = min(timeit.repeat(lambda: getattr(_core, name)(*fn_args),
                                 number=1, repeat=args.repeat))
        print(f"{label:40s} {slow:11.4f} {fast:11.4f} {slow / fast:7.1f}x")


if __name__ == "__main__":
    main()
