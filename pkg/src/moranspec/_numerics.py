"""Small numerical helpers shared by the computation modules."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

# Relative tolerance used to snap logs of exactly equal diameters/thresholds.
TIE_RTOL = 1e-12


def log_sum(log_terms, axis=None):
    """log(sum(exp(log_terms))) that tolerates all-``-inf`` input."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return logsumexp(log_terms, axis=axis)


def compare_logs(a: float, b: float) -> int:
    """Three-way comparison of two log-values with tie snapping.

    Values closer than ``TIE_RTOL`` (relative) compare equal, so that
    quantities that agree mathematically but were accumulated in a
    different order still hit the literal ``<=``/``<`` of a definition.
    """
    if a == b:
        return 0
    scale = max(1.0, abs(a), abs(b))
    if abs(a - b) <= TIE_RTOL * scale:
        return 0
    return 1 if a > b else -1


def log_le(a: float, b: float) -> bool:
    return compare_logs(a, b) <= 0


def log_gt(a: float, b: float) -> bool:
    return compare_logs(a, b) > 0


def trailing(values: np.ndarray, window: int) -> np.ndarray:
    """Last ``window`` rows of ``values`` (all rows if fewer)."""
    return values[-window:]


def geometric_then_linear(k_max: int, window: int) -> list[int]:
    """Sample schedule: powers of two below the trailing window, then every k in it."""
    start = max(1, k_max - window + 1)
    ks = []
    k = 1
    while k < start:
        ks.append(k)
        k *= 2
    ks.extend(range(start, k_max + 1))
    return ks


class CapTooSmallError(ValueError):
    """The decreasing proxy is still positive at the upper end of the search."""


def multisect(f, lo: float, hi: float, tol: float, points: int = 16):
    """Bracket the sign change of a non-increasing vectorised function.

    ``f`` maps an array of abscissae to an array of values.  Returns
    ``(a, b)`` with ``b - a <= tol`` such that ``f(a) > 0`` (or ``a == lo``)
    and ``f(b) <= 0``; this is bisection with ``points`` probes per pass,
    which only relies on the sign of ``f``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    f_lo, f_hi = f(np.array([lo, hi], dtype=float))
    if f_hi > 0:
        raise CapTooSmallError(
            f"proxy still positive ({f_hi:.6g}) at search cap t={hi:.6g}")
    if f_lo <= 0:
        return float(lo), float(lo)
    a, b = lo, hi
    while b - a > tol:
        grid = np.linspace(a, b, points + 2)[1:-1]
        vals = np.asarray(f(grid), dtype=float)
        neg = np.flatnonzero(~(vals > 0))
        if neg.size == 0:
            a = grid[-1]
        else:
            i = neg[0]
            b = grid[i]
            if i > 0:
                a = grid[i - 1]
    return float(a), float(b)


def bisect_vec(F, lo: np.ndarray, hi: np.ndarray, tol: float):
    """Elementwise bisection for independent non-increasing functions.

    ``F(s)`` evaluates every component at its own abscissa ``s[i]``.
    Requires ``F(lo) > 0 >= F(hi)`` componentwise where a root exists;
    components with ``F(lo) <= 0`` are returned as ``lo``.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    at_lo = ~(F(lo) > 0)
    n_iter = max(0, math.ceil(math.log2(max(float(np.max(hi - lo)), tol) / tol)))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        pos = F(mid) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    mid = 0.5 * (lo + hi)
    return np.where(at_lo, lo, mid), np.where(at_lo, 0.0, hi - lo)
