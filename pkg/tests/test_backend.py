import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import naive_convolve, trial_division_primes
from lpimprove import _backend
from lpimprove.primes import _base_primes

values = arrays(np.float64, st.integers(1, 60),
                elements=st.floats(-100, 100, allow_nan=False) | st.just(0.0))


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(a=values, b=values)
def test_direct_convolve_matches_oracle(backend, a, b):
    out = np.asarray(backend.direct_convolve(np.ascontiguousarray(a), np.ascontiguousarray(b)))
    ref = naive_convolve(0, a, 0, b)
    assert out.shape == (a.size + b.size - 1,)
    for x, v in ref.items():
        assert out[x] == pytest.approx(v, abs=1e-9 * max(1.0, abs(v)))


def test_direct_convolve_sparse_long(backend):
    # many zeros on one side exercise the nonzero-driven loop
    a = np.zeros(5000)
    a[[0, 17, 4999]] = [1.0, 2.0, 3.0]
    b = np.random.default_rng(0).random(300)
    out = np.asarray(backend.direct_convolve(a, b))
    np.testing.assert_allclose(out, np.convolve(a, b), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("lo, hi", [(3, 4), (3, 100), (101, 1001), (999_983, 1_000_500), (5, 5)])
def test_sieve_segment_matches_trial_division(backend, lo, hi):
    base = _base_primes(math.isqrt(hi) + 1)
    mask = np.asarray(backend.sieve_odd_segment(lo, hi, base), dtype=bool)
    odds = np.arange(lo, hi, 2)
    assert mask.size == odds.size
    expected = set(trial_division_primes(hi - 1)) if hi < 2000 else None
    for m, flag in zip(odds.tolist(), mask.tolist()):
        is_p = (m in expected) if expected is not None else \
            m > 1 and all(m % q for q in range(2, math.isqrt(m) + 1))
        assert flag == is_p, m


def test_backends_agree_on_random_segments():
    if _backend.IMPLEMENTATION != "compiled":
        pytest.skip("compiled core not available")
    from lpimprove import _core, _fallback
    rng = np.random.default_rng(5)
    for _ in range(20):
        lo = int(rng.integers(1, 10**7)) | 1
        hi = lo + int(rng.integers(1, 50_000))
        base = _base_primes(math.isqrt(hi) + 1)
        np.testing.assert_array_equal(np.asarray(_core.sieve_odd_segment(lo, hi, base)),
                                      np.asarray(_fallback.sieve_odd_segment(lo, hi, base)))


def _implementation_with_env(value):
    env = dict(os.environ)
    if value is None:
        env.pop("LPIMPROVE_PURE_PYTHON", None)
    else:
        env["LPIMPROVE_PURE_PYTHON"] = value
    out = subprocess.run([sys.executable, "-c", "import lpimprove; print(lpimprove.IMPLEMENTATION)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_forces_fallback():
    assert _implementation_with_env("1") == "python"


def test_default_prefers_compiled():
    try:
        import lpimprove._core  # noqa: F401
        expected = "compiled"
    except ImportError:
        expected = "python"
    assert _implementation_with_env(None) == expected


def test_pure_python_run_of_core_paths():
    code = (
        "import lpimprove as L\n"
        "assert L.IMPLEMENTATION == 'python'\n"
        "assert L.sieve(10**4).count == 1229\n"
        "r = L.improving_ratio(L.Signal.delta(0), L.monomial_kernel(2, 4), 2.0).ratio\n"
        "assert abs(r - 0.5) < 1e-14\n"
        "print('ok')\n"
    )
    env = dict(os.environ, LPIMPROVE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "ok"
