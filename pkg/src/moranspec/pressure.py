"""Partition sums, pressure proxies, jump points and Moran exponents."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._numerics import (CapTooSmallError, bisect_vec, geometric_then_linear,
                        log_sum, multisect)
from .system import LevelSpec, SystemSpec, level_table, materialize_level


def level_sum(level: LevelSpec, t):
    """log sum_j c_j**t over one level (``+inf`` for divergent families)."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    return level.log_sum(t)


@dataclass(frozen=True)
class WordOracle:
    """Per-word derivative norms for general conformal systems.

    ``log_norm(word)`` returns ``log ||D phi_u||`` for a word given as a tuple
    of 0-based map indices (maps within a level ordered as in its groups).
    """

    log_norm: Callable[[tuple], float]
    max_depth: int


class OracleDepthError(ValueError):
    pass


def _flat_log_ratios(level: LevelSpec) -> list:
    return [lr for lr, m in level.groups for _ in range(m)]


def partition_sum(spec: SystemSpec, k: int, t: float,
                  oracle: Optional[WordOracle] = None) -> float:
    """log S_k(t), the t-weighted sum over all depth-k words.

    In the product model this is the sum of level sums.  With a word oracle
    the words are enumerated explicitly (small k only).
    """
    if k < 1:
        raise ValueError("k must be positive")
    if oracle is None:
        return float(np.sum(level_table(spec, k).log_sums([t])[:, 0]))
    if k > oracle.max_depth:
        raise OracleDepthError(f"word oracle supports depth {oracle.max_depth}, asked for {k}")
    sizes = [materialize_level(spec, i).cardinality for i in range(1, k + 1)]
    terms = [t * oracle.log_norm(w) for w in itertools.product(*(range(n) for n in sizes))]
    return float(log_sum(np.array(terms)))


def oracle_bracket(spec: SystemSpec, k: int, t: float, oracle: WordOracle):
    """Enumerated log S_k(t) and the product-model bracket ``log C^{-/+t}``."""
    value = partition_sum(spec, k, t, oracle)
    product = partition_sum(spec, k, t)
    slack = t * math.log(spec.distortion_constant)
    return value, product - slack, product + slack


def _q_matrix(spec: SystemSpec, k_max: int, ts) -> np.ndarray:
    """(k_max, len(ts)) array of (1/k) log S_k(t)."""
    cum = np.cumsum(level_table(spec, k_max).log_sums(ts), axis=0)
    return cum / np.arange(1, k_max + 1)[:, None]


def _window_proxies(spec, k_max, window):
    def upper(ts):
        return _q_matrix(spec, k_max, ts)[-window:].max(axis=0)

    def lower(ts):
        return _q_matrix(spec, k_max, ts)[-window:].min(axis=0)

    return upper, lower


@dataclass(frozen=True)
class PressureEstimate:
    """Samples ``(k, q_k)`` of (1/k) log S_k(t) and trailing-window extremes."""

    t: float
    samples: tuple
    upper_est: float
    lower_est: float
    k_max: int
    window: int


def pressure(spec: SystemSpec, t: float, k_max: int, window: int) -> PressureEstimate:
    if k_max < 2 * window:
        raise ValueError("k_max must be at least 2 * window")
    if t < 0:
        raise ValueError("t must be non-negative")
    q = _q_matrix(spec, k_max, [t])[:, 0]
    ks = geometric_then_linear(k_max, window)
    tail = q[-window:]
    return PressureEstimate(t=float(t), samples=tuple((k, float(q[k - 1])) for k in ks),
                            upper_est=float(tail.max()), lower_est=float(tail.min()),
                            k_max=k_max, window=window)


@dataclass(frozen=True)
class JumpPointResult:
    """Estimates of the critical exponents of the upper/lower pressure.

    ``raw_upper``/``raw_lower`` are the bisection results before the
    degenerate (pressure ``-inf`` for all t > 0) mapping to 0.
    """

    s_upper: float
    s_lower: float
    upper_width: float
    lower_width: float
    k_max: int
    window: int
    degenerate_upper: bool
    degenerate_lower: bool
    raw_upper: float
    raw_lower: float

    @property
    def degenerate(self) -> bool:
        return self.degenerate_lower and self.degenerate_upper


def _roots(spec, k_max, window, tol, cap):
    upper, lower = _window_proxies(spec, k_max, window)
    a_u, b_u = multisect(upper, 0.0, cap, tol)
    a_l, b_l = multisect(lower, 0.0, cap, tol)
    return 0.5 * (a_u + b_u), b_u - a_u, 0.5 * (a_l + b_l), b_l - a_l


def jump_points(spec: SystemSpec, k_max: int = 2000, window: int = 500,
                tol: float = 1e-4, cap: Optional[float] = None,
                degenerate_ratio: float = 0.75,
                degenerate_floor: float = 0.05) -> JumpPointResult:
    """Sign-change points of the windowed upper and lower pressure proxies.

    A root is declared degenerate (true exponent 0) when it is below
    ``degenerate_floor`` and shrinks by at least ``degenerate_ratio`` when the
    depth doubles, i.e. the pressure keeps drifting to ``-inf``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if k_max < 2 * window:
        raise ValueError("k_max must be at least 2 * window")
    cap = float(spec.dimension if cap is None else cap)
    try:
        su, wu, sl, wl = _roots(spec, k_max, window, tol, cap)
    except CapTooSmallError as exc:
        raise CapTooSmallError(f"{exc}; raise the cap above {cap}") from None
    half_k, half_w = k_max // 2, max(1, window // 2)
    hu, _, hl, _ = _roots(spec, half_k, half_w, tol, cap)

    def degenerate(s, s_half):
        return s < degenerate_floor and s <= degenerate_ratio * s_half + tol

    deg_u, deg_l = bool(degenerate(su, hu)), bool(degenerate(sl, hl))
    return JumpPointResult(
        s_upper=0.0 if deg_u else su, s_lower=0.0 if deg_l else sl,
        upper_width=wu, lower_width=wl, k_max=k_max, window=window,
        degenerate_upper=deg_u, degenerate_lower=deg_l, raw_upper=su, raw_lower=sl)


def _moran_vec(spec: SystemSpec, ks, tol: float) -> np.ndarray:
    ks = np.asarray(ks, dtype=int)
    k_max = int(ks.max())
    tab = level_table(spec, k_max)
    if tab.families:
        raise ValueError("Moran exponents need finite levels")

    def F(s):
        # F_j(s) = sum_{i <= ks[j]} level_sum(i, s[j])
        ls = tab.log_sums(s)
        return np.cumsum(ls, axis=0)[ks - 1, np.arange(len(ks))]

    lo = np.zeros(len(ks))
    hi = np.ones(len(ks))
    while True:
        bad = F(hi) > 0
        if not bad.any():
            break
        hi = np.where(bad, 2 * hi, hi)
    s, _ = bisect_vec(F, lo, hi, tol)
    return s


def moran_exponent(spec: SystemSpec, k: int, tol: float = 1e-10) -> float:
    """Root s_k of prod_{i<=k} sum_j c_{i,j}**s = 1."""
    if k < 1:
        raise ValueError("k must be positive")
    return float(_moran_vec(spec, [k], tol)[0])


def moran_exponents(spec: SystemSpec, ks, tol: float = 1e-10) -> np.ndarray:
    return _moran_vec(spec, ks, tol)


def moran_limits(spec: SystemSpec, k_max: int, window: int, tol: float = 1e-8):
    """Trailing-window (min, max) of s_k as liminf/limsup estimates."""
    if k_max < 2 * window:
        raise ValueError("k_max must be at least 2 * window")
    s = _moran_vec(spec, np.arange(k_max - window + 1, k_max + 1), tol)
    return float(s.min()), float(s.max())
