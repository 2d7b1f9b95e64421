"""Command line entry point: ``lpimprove <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

from . import _backend
from .bounds import improving_ratio
from .checks import check_all
from .extremize import power_iterate
from .kernels import kernels_from_spec
from .primes import chebyshev_theta, prime_sum_estimate, sieve
from .signals import Signal, convolve
from .sweep import ConfigError, SweepConfig, run_sweep

log = logging.getLogger("lpimprove")


def _add_kernel_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--kind", default="poly",
                    choices=["poly", "quadratic", "primes", "fracint", "prime_fracint"])
    ap.add_argument("-N", "--N", type=int, required=True, help="averaging length or truncation")
    ap.add_argument("--degree", "-d", type=int, default=2)
    ap.add_argument("--coeffs", type=int, nargs=3, metavar=("A", "B", "C"), default=(1, 0, 0))
    ap.add_argument("--lam", type=float, default=None, help="fractional-integral exponent")


def _kernel(args):
    if args.kind in ("fracint", "prime_fracint") and args.lam is None:
        raise SystemExit(f"--lam is required for kind {args.kind}")
    return kernels_from_spec(args.kind, args.N, args.degree, args.coeffs, args.lam)


def _read_signal(path: str) -> Signal:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return Signal.from_json(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_kernel_dump(args) -> int:
    K = _kernel(args)
    if args.format == "csv":
        _emit(K.trimmed().to_csv().rstrip("\n"), args.out)
    else:
        _emit(json.dumps(K.to_dict()), args.out)
    return 0


def cmd_apply(args) -> int:
    K = _kernel(args)
    out = convolve(_read_signal(args.input), K, args.path)
    _emit(out.to_csv().rstrip("\n") if args.format == "csv" else out.to_json(), args.out)
    return 0


def _input_signal(args, K) -> Signal:
    if args.input:
        return _read_signal(args.input)
    if args.family == "indicator":
        S = max(abs(K.start), abs(K.stop - 1))
        return Signal.indicator(-S, S)
    return Signal.delta(0)


def cmd_ratio(args) -> int:
    K = _kernel(args)
    rec = improving_ratio(_input_signal(args, K), K, args.p, args.path)
    _emit(json.dumps(rec.to_dict(), sort_keys=True), args.out)
    return 0


SWEEP_OVERRIDES = {
    "kind": "kind", "degree": "degree", "coeffs": "coeffs", "p": "p_values",
    "n_start": "n_start", "n_factor": "n_factor", "n_count": "n_count", "n_values": "n_values",
    "family": "family", "input": "input_file", "csv": "csv_path", "json": "json_path",
    "gnuplot": "gnuplot_path", "workers": "workers", "seed": "seed", "tol": "tol",
    "max_iter": "max_iter",
}


def sweep_config_from_args(args) -> SweepConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    for flag, key in SWEEP_OVERRIDES.items():
        val = getattr(args, flag, None)
        if val is not None:
            base[key] = val
    return SweepConfig.from_dict(base)


def cmd_sweep(args) -> int:
    try:
        cfg = sweep_config_from_args(args)
        report = run_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if not cfg.json_path:
        print(report.to_json())
    for fit in report.fits:
        print(f"p={fit.p:g} slope={fit.slope:+.5f} +/- {fit.stderr:.1e} verdict={fit.verdict}",
              file=sys.stderr)
    for fail in report.failures:
        print(f"cell p={fail['p']} N={fail['N']} failed: {fail['error']}", file=sys.stderr)
    return 0


def cmd_extremize(args) -> int:
    K = _kernel(args)
    res = power_iterate(K, args.p, tuple(args.window) if args.window else None, tol=args.tol,
                        max_iter=args.max_iter, restarts=args.restarts, seed=args.seed)
    d = res.to_dict()
    if not args.trace:
        d.pop("trace")
    _emit(json.dumps(d), args.out)
    print(f"ratio={res.ratio!r} iterations={res.iterations} converged={res.converged}",
          file=sys.stderr)
    return 0


def cmd_primes_check(args) -> int:
    rows = []
    if args.table == "primes":
        header = ["n", "p_n"]
        rows = [[i + 1, int(q)] for i, q in enumerate(sieve(args.limit).primes)]
    elif args.table == "theta":
        header = ["N", "theta", "theta_over_N"]
        for N in _decades(args.limit):
            th = chebyshev_theta(N)
            rows.append([N, repr(th), repr(th / N)])
    else:
        header = ["lambda", "N", "sum", "ratio"]
        for lam in args.lam:
            for N in _decades(args.limit):
                ps = prime_sum_estimate(lam, N)
                rows.append([lam, N, repr(ps.sum), repr(ps.ratio)])
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


def _decades(limit: int) -> list[int]:
    return [10**k for k in range(1, int(math.log10(limit)) + 1) if 10**k <= limit] or [limit]


def cmd_check_all(args) -> int:
    print(f"backend: {_backend.IMPLEMENTATION}")
    results = check_all(set(args.only) if args.only else None)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    if args.json:
        Path(args.json).write_text(json.dumps(
            [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail,
              "seconds": r.seconds} for r in results], indent=1))
    return 0 if n_pass == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpimprove",
                                 description="l^p-improving estimates for discrete averages")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    kern = sub.add_parser("kernel", help="kernel utilities")
    ksub = kern.add_subparsers(dest="kernel_command", required=True)
    dump = ksub.add_parser("dump", help="print a kernel as JSON or CSV")
    _add_kernel_args(dump)
    dump.add_argument("--format", choices=["json", "csv"], default="json")
    dump.add_argument("-o", "--out")
    dump.set_defaults(func=cmd_kernel_dump)

    app = sub.add_parser("apply", help="convolve a signal (JSON, '-' for stdin) with a kernel")
    _add_kernel_args(app)
    app.add_argument("input")
    app.add_argument("--path", choices=["auto", "direct", "fft"], default="auto")
    app.add_argument("--format", choices=["json", "csv"], default="json")
    app.add_argument("-o", "--out")
    app.set_defaults(func=cmd_apply)

    rat = sub.add_parser("ratio", help="normalized improving ratio for one input")
    _add_kernel_args(rat)
    rat.add_argument("-p", type=float, required=True)
    rat.add_argument("--input", help="signal JSON file")
    rat.add_argument("--family", choices=["delta", "indicator"], default="delta")
    rat.add_argument("--path", choices=["auto", "direct", "fft"], default="auto")
    rat.add_argument("-o", "--out")
    rat.set_defaults(func=cmd_ratio)

    sw = sub.add_parser("sweep", help="(p, N) sweep with slope fits")
    sw.add_argument("--config", help="JSON config file; flags override its keys")
    sw.add_argument("--kind", choices=["poly", "quadratic", "primes"])
    sw.add_argument("--degree", type=int)
    sw.add_argument("--coeffs", type=int, nargs=3)
    sw.add_argument("-p", "--p", type=float, nargs="+")
    sw.add_argument("--n-start", type=int)
    sw.add_argument("--n-factor", type=float)
    sw.add_argument("--n-count", type=int)
    sw.add_argument("--n-values", type=int, nargs="+")
    sw.add_argument("--family", choices=["delta", "indicator", "extremal", "file"])
    sw.add_argument("--input")
    sw.add_argument("--csv")
    sw.add_argument("--json")
    sw.add_argument("--gnuplot")
    sw.add_argument("--workers", type=int)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--tol", type=float)
    sw.add_argument("--max-iter", type=int)
    sw.set_defaults(func=cmd_sweep)

    ex = sub.add_parser("extremize", help="near-extremal input by power iteration")
    _add_kernel_args(ex)
    ex.add_argument("-p", type=float, required=True)
    ex.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    ex.add_argument("--tol", type=float, default=1e-8)
    ex.add_argument("--max-iter", type=int, default=500)
    ex.add_argument("--restarts", type=int, default=0)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--trace", action="store_true", help="include the ratio trace")
    ex.add_argument("-o", "--out")
    ex.set_defaults(func=cmd_extremize)

    pr = sub.add_parser("primes", help="prime utilities")
    psub = pr.add_subparsers(dest="primes_command", required=True)
    pc = psub.add_parser("check", help="CSV tables of primes, theta, or prime-sum ratios")
    pc.add_argument("--limit", type=int, default=1000)
    pc.add_argument("--table", choices=["primes", "theta", "ratio"], default="primes")
    pc.add_argument("--lam", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    pc.add_argument("-o", "--out")
    pc.set_defaults(func=cmd_primes_check)

    ca = sub.add_parser("check-all", help="run the acceptance suite")
    ca.add_argument("--only", nargs="+", help="criterion numbers, e.g. 1 9a")
    ca.add_argument("--json", help="write results as JSON")
    ca.set_defaults(func=cmd_check_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
