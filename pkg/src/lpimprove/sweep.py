"""Parameter sweeps over (p, N) grids with log-log exponent fits."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .bounds import RatioRecord, improving_ratio
from .extremize import default_window, power_iterate, random_positive_init
from .kernels import IntPolynomial, Kernel, monomial_kernel, poly_kernel, prime_kernel
from .regression import regress_exponent
from .signals import Signal

log = logging.getLogger(__name__)

SLOPE_THRESHOLD = 0.02
OPERATOR_KINDS = ("poly", "quadratic", "primes")
INPUT_FAMILIES = ("delta", "indicator", "extremal", "file")


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    kind: str = "poly"
    degree: int = 2
    coeffs: tuple[int, int, int] = (1, 0, 0)
    p_values: tuple[float, ...] = (2.0,)
    n_start: int = 16
    n_factor: float = 2.0
    n_count: int = 7
    n_values: tuple[int, ...] | None = None
    family: str = "delta"
    input_file: str | None = None
    csv_path: str | None = None
    json_path: str | None = None
    gnuplot_path: str | None = None
    workers: int = 1
    seed: int = 0
    tol: float = 1e-8
    max_iter: int = 500

    def __post_init__(self):
        self.coeffs = tuple(int(c) for c in self.coeffs)
        self.p_values = tuple(float(p) for p in self.p_values)
        if self.n_values is not None:
            self.n_values = tuple(int(n) for n in self.n_values)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    @classmethod
    def from_json_file(cls, path) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["coeffs"] = list(self.coeffs)
        d["p_values"] = list(self.p_values)
        d["n_values"] = list(self.n_values) if self.n_values is not None else None
        return d

    def n_grid(self) -> list[int]:
        if self.n_values is not None:
            return list(self.n_values)
        return [int(round(self.n_start * self.n_factor**i)) for i in range(self.n_count)]

    def validate(self) -> None:
        if self.kind not in OPERATOR_KINDS:
            raise ConfigError(f"kind must be one of {OPERATOR_KINDS}, got {self.kind!r}")
        if self.family not in INPUT_FAMILIES:
            raise ConfigError(f"family must be one of {INPUT_FAMILIES}, got {self.family!r}")
        if not self.p_values:
            raise ConfigError("p_values is empty")
        for p in self.p_values:
            if not 1 < p <= 2:
                raise ConfigError(f"p={p} outside (1, 2]")
        grid = self.n_grid()
        if len(grid) < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"N grid must be strictly increasing, got {grid}")
        min_n = 2 if self.kind == "primes" else 1
        if grid[0] < min_n:
            raise ConfigError(f"N must be >= {min_n} for kind {self.kind}, got {grid[0]}")
        if self.kind == "poly" and self.degree < 1:
            raise ConfigError("degree must be >= 1")
        if self.kind == "quadratic":
            if len(self.coeffs) != 3:
                raise ConfigError("quadratic needs coeffs (a, b, c)")
            a, b, c = self.coeffs
            if a < 1 or b < 0 or c < 0:
                raise ConfigError(f"quadratic needs a >= 1 and b, c >= 0, got {self.coeffs}")
        if self.family == "file" and not self.input_file:
            raise ConfigError("family 'file' needs input_file")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.tol <= 0 or self.max_iter < 1:
            raise ConfigError("tol must be positive and max_iter >= 1")

    def kernel(self, N: int) -> Kernel:
        if self.kind == "poly":
            return monomial_kernel(self.degree, N)
        if self.kind == "quadratic":
            return poly_kernel(IntPolynomial.quadratic(*self.coeffs), N)
        return prime_kernel(N)


@dataclass
class SlopeFit:
    p: float
    slope: float
    stderr: float
    verdict: str
    max_over_min: float
    n_points: int


def classify_slope(slope: float, threshold: float = SLOPE_THRESHOLD) -> str:
    if abs(slope) <= threshold:
        return "bounded"
    return "growing" if slope > threshold else "shrinking"


@dataclass
class SweepReport:
    config: SweepConfig
    records: list[RatioRecord]
    fits: list[SlopeFit]
    failures: list[dict] = field(default_factory=list)

    def fit_for(self, p: float) -> SlopeFit:
        for fit in self.fits:
            if fit.p == p:
                return fit
        raise KeyError(p)

    @property
    def fitted_slope(self) -> float:
        if len(self.fits) != 1:
            raise ValueError("fitted_slope is only defined for single-p sweeps")
        return self.fits[0].slope

    @property
    def slope_stderr(self) -> float:
        return self.fits[0].stderr

    @property
    def verdict(self) -> str:
        return self.fits[0].verdict if len(self.fits) == 1 else ",".join(f.verdict for f in self.fits)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "fits": [asdict(f) for f in self.fits],
            "failures": self.failures,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RatioRecord.CSV_COLUMNS)
            for r in self.records:
                w.writerow(r.csv_row())

    def write_gnuplot(self, path) -> None:
        """One data block per p (``N ratio``), blocks separated by two blank lines."""
        lines = []
        for fit in self.fits:
            lines.append(f"# p={fit.p!r} slope={fit.slope!r}")
            lines += [f"{r.N} {r.ratio!r}" for r in self.records if r.p == fit.p]
            lines += ["", ""]
        Path(path).write_text("\n".join(lines))


def cell_input(config: SweepConfig, K: Kernel, p: float, N: int) -> Signal:
    if config.family == "delta":
        return Signal.delta(0)
    if config.family == "indicator":
        S = max(abs(K.start), abs(K.stop - 1))
        return Signal.indicator(-S, S)
    if config.family == "file":
        return Signal.from_json(Path(config.input_file).read_text())
    # A random positive start avoids the slow plateau around the constant
    # profile that appears for p near the endpoint.
    rng = np.random.default_rng([config.seed, N, int(round(p * 10**6))])
    lo, hi = default_window(K)
    res = power_iterate(K, p, (lo, hi), tol=config.tol, max_iter=config.max_iter,
                        init=random_positive_init(hi - lo + 1, rng))
    if not res.converged:
        log.warning("extremizer not converged for p=%s N=%s after %d iterations",
                    p, N, res.iterations)
    return res.f


def _run_cell(config_dict: dict, p: float, N: int) -> tuple[float, int, dict | None, str | None]:
    config = SweepConfig.from_dict(config_dict)
    try:
        K = config.kernel(N)
        f = cell_input(config, K, p, N)
        return p, N, improving_ratio(f, K, p).to_dict(), None
    except Exception as exc:  # per-cell failures are reported, not fatal
        return p, N, None, f"{type(exc).__name__}: {exc}"


def fit_records(p_values: Sequence[float], records: Sequence[RatioRecord]) -> list[SlopeFit]:
    fits = []
    for p in p_values:
        pts = [(r.N, r.ratio) for r in records if r.p == p and r.ratio > 0]
        if len(pts) < 3:
            continue
        slope, err = regress_exponent(pts)
        ratios = [r for _, r in pts]
        fits.append(SlopeFit(p, slope, err, classify_slope(slope), max(ratios) / min(ratios),
                             len(pts)))
    return fits


def run_sweep(config: SweepConfig, write: bool = True) -> SweepReport:
    """Compute one :class:`RatioRecord` per (p, N), fit slopes, emit outputs."""
    config.validate()
    cfg = config.to_dict()
    cells = [(p, N) for p in config.p_values for N in config.n_grid()]
    if config.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            results = list(ex.map(_run_cell, [cfg] * len(cells), *zip(*cells)))
    else:
        results = [_run_cell(cfg, p, N) for p, N in cells]
    results.sort(key=lambda t: (t[0], t[1]))
    records = [RatioRecord.from_dict(r) for _, _, r, _ in results if r is not None]
    failures = [{"p": p, "N": N, "error": e} for p, N, _, e in results if e is not None]
    report = SweepReport(config, records, fit_records(config.p_values, records), failures)
    if write:
        if config.csv_path:
            report.write_csv(config.csv_path)
        if config.json_path:
            Path(config.json_path).write_text(report.to_json())
        if config.gnuplot_path:
            report.write_gnuplot(config.gnuplot_path)
    return report


__all__ = [
    "ConfigError",
    "SlopeFit",
    "SweepConfig",
    "SweepReport",
    "classify_slope",
    "regress_exponent",
    "run_sweep",
]
