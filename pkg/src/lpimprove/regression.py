"""Least-squares scaling exponents on log-log data."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def regress_exponent(pairs: Iterable[tuple[float, float]]) -> tuple[float, float]:
    """OLS slope of ``log ratio`` against ``log N`` and its standard error.

    Needs at least three points, positive ratios and at least two distinct N.
    The standard error is zero for exact power laws.
    """
    pts = [(float(n), float(r)) for n, r in pairs]
    if len(pts) < 3:
        raise ValueError("need at least 3 (N, ratio) pairs")
    if any(r <= 0 or not math.isfinite(r) for _, r in pts):
        raise ValueError("ratios must be positive and finite")
    if any(n <= 0 for n, _ in pts):
        raise ValueError("N values must be positive")
    if len({n for n, _ in pts}) < 2:
        raise ValueError("degenerate N grid (all N equal)")
    x = np.log([n for n, _ in pts])
    y = np.log([r for _, r in pts])
    dx = x - x.mean()
    sxx = float(dx @ dx)
    slope = float(dx @ (y - y.mean())) / sxx
    resid = y - y.mean() - slope * dx
    dof = len(pts) - 2
    stderr = math.sqrt(max(float(resid @ resid), 0.0) / dof / sxx) if dof > 0 else 0.0
    return slope, stderr
