"""Constrained cut-set minimisation and intermediate dimension spectra.

A cut set is admissible at scale ``delta`` and parameter ``theta`` when each
element ``u`` has ``|J_u| <= delta`` and its parent has diameter strictly
greater than ``delta**(1/theta)``.  The root has diameter ``|J|`` and is never
an element itself.  All diameters and thresholds are compared as logs with
tie snapping (see :func:`moranspec._numerics.compare_logs`).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._numerics import TIE_RTOL, compare_logs, log_gt, log_le, log_sum, multisect
from .pressure import jump_points
from .system import SystemSpec, level_table, materialize_level


class MemoBudgetError(RuntimeError):
    """Too many distinct word classes for the exact DP."""


class InstanceTooLargeError(RuntimeError):
    """Brute-force enumeration refused (too many admissible cut sets)."""


class SummaryMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class CutSetProblem:
    """One ``(delta, theta, t)`` instance; ``delta`` is stored as its log."""

    log_delta: float
    theta: float
    t: float
    depth_cap: int = 200_000

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if not self.log_delta < 0.0 and not math.isclose(self.log_delta, 0.0):
            raise ValueError("delta must not exceed 1 (so that delta**(1/theta) <= delta)")

    @classmethod
    def at(cls, delta: float, theta: float, t: float, **kw) -> "CutSetProblem":
        if not delta > 0:
            raise ValueError("delta must be positive")
        return cls(math.log(delta), theta, t, **kw)

    @property
    def delta(self) -> float:
        return math.exp(self.log_delta)

    @property
    def log_threshold(self) -> float:
        return self.log_delta / self.theta


@dataclass(frozen=True)
class CutSetResult:
    """Optimal cost and a per-level summary of an optimal cut set.

    ``classes`` lists ``(level, log_weight, count)``: ``count`` cut elements
    at ``level`` each of weight ``exp(log_weight)``.
    """

    min_cost_log: float
    k_delta: int
    level_counts: tuple
    classes: tuple
    exact: bool
    log_delta: float
    theta: float
    t: float

    def recompute_log_cost(self) -> float:
        return float(log_sum(np.array([math.log(c) + self.t * lw for _, lw, c in self.classes])))


def _check_delta(spec: SystemSpec, log_delta: float):
    if compare_logs(log_delta, spec.log_diameter) >= 0:
        raise ValueError("delta must be smaller than the ambient diameter |J|")


def k_delta(spec: SystemSpec, delta: float = None, *, log_delta: float = None) -> int:
    """Smallest k with m_k |J| <= delta (depth at which the fastest word crosses delta)."""
    if log_delta is None:
        if delta is None or not delta > 0:
            raise ValueError("delta must be positive")
        log_delta = math.log(delta)
    _check_delta(spec, log_delta)
    acc = spec.log_diameter
    k = 0
    while True:
        k += 1
        acc += materialize_level(spec, k).log_min_ratio
        if log_le(acc, log_delta):
            return k


# ---------------------------------------------------------------------------
# Exact DP over word classes
# ---------------------------------------------------------------------------

@dataclass
class _Layer:
    keys: list = field(default_factory=list)
    log_w: list = field(default_factory=list)
    can_stop: list = field(default_factory=list)
    can_expand: list = field(default_factory=list)
    # edges from this layer's states to the next layer: (parent, child, log multiplicity, multiplicity)
    edges: list = field(default_factory=list)
    arrays: Optional[tuple] = None


def _bump(key: tuple, idx: int) -> tuple:
    lst = list(key) + [0] * (idx + 1 - len(key))
    lst[idx] += 1
    return tuple(lst)


def _explore(spec: SystemSpec, log_delta: float, theta: float,
             budget: int, depth_cap: int) -> list:
    """Forward pass: all word classes reachable through admissible expansions."""
    log_thr = log_delta / theta
    logJ = spec.log_diameter
    ratio_ids: dict = {}
    logr: list = []
    root = _Layer(keys=[()], log_w=[0.0], can_stop=[False], can_expand=[True])
    layers = [root]
    total = 1
    k = 0
    while True:
        cur = layers[-1]
        expanding = [i for i, e in enumerate(cur.can_expand) if e]
        if not expanding:
            break
        k += 1
        if k > depth_cap:
            raise MemoBudgetError(f"depth cap {depth_cap} exceeded at level {k}")
        level = materialize_level(spec, k)
        if not level.is_finite:
            raise ValueError("cut-set minimisation needs finite levels; truncate first")
        nxt = _Layer()
        index: dict = {}
        for i in expanding:
            key = cur.keys[i]
            for lr, m in level.groups:
                rid = ratio_ids.setdefault(lr, len(logr))
                if rid == len(logr):
                    logr.append(lr)
                child = _bump(key, rid)
                j = index.get(child)
                if j is None:
                    j = len(nxt.keys)
                    index[child] = j
                    nxt.keys.append(child)
                    lw = math.fsum(c * logr[r] for r, c in enumerate(child) if c)
                    nxt.log_w.append(lw)
                    log_d = logJ + lw
                    nxt.can_stop.append(log_le(log_d, log_delta))
                    nxt.can_expand.append(log_gt(log_d, log_thr))
                cur.edges.append((i, j, math.log(m), m))
        total += len(nxt.keys)
        if total > budget:
            raise MemoBudgetError(
                f"memo budget {budget} exceeded at level {k}: {len(nxt.keys)} classes "
                f"from {len(level.groups)} distinct ratios at this level "
                f"({len(logr)} distinct ratios so far)")
        layers.append(nxt)
    return layers


def _compile(L: _Layer):
    """Array form of a layer, cached on it (edges are grouped by parent)."""
    if getattr(L, "arrays", None) is None:
        lw = np.array(L.log_w)
        stop_ok = np.array(L.can_stop)
        expand_ok = np.array(L.can_expand)
        if L.edges:
            e = np.array([(p, c, lm) for p, c, lm, _ in L.edges])
            par = e[:, 0].astype(int)
            starts = np.flatnonzero(np.r_[True, par[1:] != par[:-1]])
            arrays = (lw, stop_ok, expand_ok, e[:, 1].astype(int), e[:, 2], par[starts], starts)
        else:
            arrays = (lw, stop_ok, expand_ok, None, None, None, None)
        L.arrays = arrays
    return L.arrays


def _backward(layers: list, ts: np.ndarray):
    """Optimal log-costs per state (vectorised over t) and stop decisions."""
    n_t = len(ts)
    costs = [None] * len(layers)
    stops = [None] * len(layers)
    for d in range(len(layers) - 1, -1, -1):
        lw, stop_ok, expand_ok, child, log_mult, parents, starts = _compile(layers[d])
        stop = np.where(stop_ok[:, None], lw[:, None] * ts[None, :], np.inf)
        expand = np.full((len(lw), n_t), np.inf)
        if child is not None:
            vals = log_mult[:, None] + costs[d + 1][child]
            peak = np.maximum.reduceat(vals, starts, axis=0)
            seg = np.repeat(np.arange(len(starts)), np.diff(np.r_[starts, len(vals)]))
            acc = np.add.reduceat(np.exp(vals - peak[seg]), starts, axis=0)
            expand[parents] = peak + np.log(acc)
        expand[~expand_ok] = np.inf
        stops[d] = stop <= expand
        costs[d] = np.minimum(stop, expand)
    return costs, stops


def _summary_from_dp(layers, stops) -> tuple:
    counts = {0: 1}
    classes = []
    for d, L in enumerate(layers):
        nxt: dict = {}
        for i, c in counts.items():
            if stops[d][i, 0]:
                classes.append((d, L.log_w[i], c))
        for p, ch, _, m in L.edges:
            c = counts.get(p)
            if c is not None and not stops[d][p, 0]:
                nxt[ch] = nxt.get(ch, 0) + c * m
        counts = nxt
    return tuple(classes)


# ---------------------------------------------------------------------------
# Uniform levels (one group per level): every node of a level is equivalent
# ---------------------------------------------------------------------------

def _uniform_applicable(spec: SystemSpec, depth: int) -> bool:
    tab = level_table(spec, depth)
    return not tab.families and tab.log_m.shape[1] == 1


def _depth_needed(spec: SystemSpec, log_thr: float, depth_cap: int) -> int:
    """First depth at which every word has diameter <= threshold."""
    acc = spec.log_diameter
    k = 0
    while True:
        k += 1
        if k > depth_cap:
            raise MemoBudgetError(f"depth cap {depth_cap} exceeded")
        acc += materialize_level(spec, k).log_max_ratio
        if log_le(acc, log_thr):
            return k


def _snap_first_le(log_d: np.ndarray, bound: np.ndarray) -> np.ndarray:
    """Index of the first entry of decreasing ``log_d`` that is <= bound (snapped)."""
    slack = TIE_RTOL * np.maximum(1.0, np.abs(bound))
    return np.searchsorted(-log_d, -(bound + slack), side="left")


class _RangeMin:
    """Sparse table for range minima of the rows of a 2-D array."""

    def __init__(self, g: np.ndarray):
        self.tables = [g]
        span = 1
        while 2 * span <= len(g):
            prev = self.tables[-1]
            self.tables.append(np.minimum(prev[:-span], prev[span:]))
            span *= 2

    def query(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Row-minimum over inclusive ranges [a_i, b_i] for each query i."""
        length = b - a + 1
        p = np.floor(np.log2(length)).astype(int)
        out = np.empty((len(a), self.tables[0].shape[1]))
        for level in np.unique(p):
            sel = p == level
            tab = self.tables[level]
            out[sel] = np.minimum(tab[a[sel]], tab[b[sel] - (1 << level) + 1])
        return out


def _uniform_costs(spec: SystemSpec, log_deltas: np.ndarray, theta: float,
                   ts: np.ndarray, depth_cap: int):
    """Optimal log-costs (n_delta, n_t), k_delta and optimal levels for uniform levels."""
    log_thr = log_deltas / theta
    depth = _depth_needed(spec, float(log_thr.min()), depth_cap)
    tab = level_table(spec, depth)
    L = np.cumsum(tab.log_r[:, 0])
    A = np.cumsum(tab.log_m[:, 0])
    log_d = spec.log_diameter + L
    kd = _snap_first_le(log_d, log_deltas)
    kt = _snap_first_le(log_d, log_thr)
    g = A[:, None] + L[:, None] * ts[None, :]
    best = _RangeMin(g).query(kd, kt)
    return best, kd + 1, (kd, kt, g)


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def min_cut_cost(spec: SystemSpec, problem: CutSetProblem, method: str = "auto",
                 memo_budget: int = 200_000) -> CutSetResult:
    """Exact minimum of sum_{u in M} w_u**t over admissible cut sets M.

    ``method`` is ``"dp"`` (word-class dynamic programme), ``"uniform"``
    (levels with a single ratio group) or ``"auto"``.
    """
    _check_delta(spec, problem.log_delta)
    kd = k_delta(spec, log_delta=problem.log_delta)
    ts = np.array([problem.t], dtype=float)
    depth = _depth_needed(spec, problem.log_threshold, problem.depth_cap)
    if method == "auto":
        method = "uniform" if _uniform_applicable(spec, depth) else "dp"
    if method == "uniform":
        if not _uniform_applicable(spec, depth):
            raise ValueError("uniform method needs one ratio group per level")
        best, _, (kds, kts, g) = _uniform_costs(
            spec, np.array([problem.log_delta]), problem.theta, ts, problem.depth_cap)
        a, b = int(kds[0]), int(kts[0])
        j = a + int(np.argmin(g[a:b + 1, 0]))
        tab = level_table(spec, j + 1)
        count = math.prod(int(materialize_level(spec, i).groups[0][1]) for i in range(1, j + 2))
        lw = float(np.sum(tab.log_r[:, 0]))
        classes = ((j + 1, lw, count),)
        cost = float(best[0, 0])
    elif method == "dp":
        layers = _explore(spec, problem.log_delta, problem.theta, memo_budget, problem.depth_cap)
        costs, stops = _backward(layers, ts)
        classes = _summary_from_dp(layers, stops)
        cost = float(costs[0][0, 0])
    else:
        raise ValueError(f"unknown method {method!r}")
    level_counts = {}
    for lev, _, c in classes:
        level_counts[lev] = level_counts.get(lev, 0) + c
    return CutSetResult(min_cost_log=cost, k_delta=kd,
                        level_counts=tuple(sorted(level_counts.items())),
                        classes=tuple(classes), exact=True, log_delta=problem.log_delta,
                        theta=problem.theta, t=problem.t)


def count_cut_sets(spec: SystemSpec, problem: CutSetProblem, limit: int = 10 ** 7) -> int:
    """Number of admissible cut sets (word by word; capped at ``limit`` + 1)."""
    _check_delta(spec, problem.log_delta)
    log_thr = problem.log_threshold
    logJ = spec.log_diameter

    def count(k, log_w):
        log_d = logJ + log_w
        n = 1 if (k > 0 and log_le(log_d, problem.log_delta)) else 0
        if k == 0 or log_gt(log_d, log_thr):
            prod = 1
            for lr, m in materialize_level(spec, k + 1).groups:
                prod *= count(k + 1, log_w + lr) ** m
                if prod > limit:
                    return limit + 1
            n += prod
        return min(n, limit + 1)

    return count(0, 0.0)


def brute_force_min_cut(spec: SystemSpec, problem: CutSetProblem,
                        max_cut_sets: int = 200_000, max_depth: int = 6,
                        max_branches: int = 3) -> CutSetResult:
    """Minimum cost by explicit enumeration of every admissible cut set.

    Words are expanded one map at a time with diameters accumulated along the
    word; intended as a test oracle for :func:`min_cut_cost`.
    """
    _check_delta(spec, problem.log_delta)
    if count_cut_sets(spec, problem, max_cut_sets) > max_cut_sets:
        raise InstanceTooLargeError("too many admissible cut sets to enumerate")
    log_thr = problem.log_threshold
    logJ = spec.log_diameter
    t = problem.t

    def enumerate_from(word_len, log_w):
        """All cut sets of the subtree: list of (cut elements as (level, log_w))."""
        log_d = logJ + log_w
        options = []
        if word_len > 0 and log_le(log_d, problem.log_delta):
            options.append(((word_len, log_w),))
        if word_len == 0 or log_gt(log_d, log_thr):
            if word_len + 1 > max_depth:
                raise InstanceTooLargeError(f"admissible depth exceeds {max_depth}")
            level = materialize_level(spec, word_len + 1)
            flat = [lr for lr, m in level.groups for _ in range(m)]
            if len(flat) > max_branches:
                raise InstanceTooLargeError(f"more than {max_branches} branches at a level")
            child_sets = [enumerate_from(word_len + 1, log_w + lr) for lr in flat]
            for combo in itertools.product(*child_sets):
                options.append(tuple(itertools.chain.from_iterable(combo)))
        return options

    best = None
    for cut in enumerate_from(0, 0.0):
        cost = float(log_sum(np.array([t * lw for _, lw in cut])))
        if best is None or cost < best[0]:
            best = (cost, cut)
    cost, cut = best
    merged: dict = {}
    for lev, lw in cut:
        merged[(lev, lw)] = merged.get((lev, lw), 0) + 1
    level_counts: dict = {}
    for (lev, _), c in merged.items():
        level_counts[lev] = level_counts.get(lev, 0) + c
    return CutSetResult(min_cost_log=cost, k_delta=k_delta(spec, log_delta=problem.log_delta),
                        level_counts=tuple(sorted(level_counts.items())),
                        classes=tuple((lev, lw, c) for (lev, lw), c in sorted(merged.items())),
                        exact=True, log_delta=problem.log_delta, theta=problem.theta, t=t)


def cover_cost(spec: SystemSpec, summary: CutSetResult, delta: float, theta: float,
               s: float) -> float:
    """Cost sum_u max(|J_u|, delta**(1/theta))**s of the inflated cover of a cut set."""
    if not (math.isclose(math.log(delta), summary.log_delta, rel_tol=1e-12, abs_tol=1e-12)
            and math.isclose(theta, summary.theta, rel_tol=1e-12)):
        raise SummaryMismatchError("cut-set summary was computed for a different (delta, theta)")
    log_thr = math.log(delta) / theta
    terms = [math.log(c) + s * max(spec.log_diameter + lw, log_thr)
             for _, lw, c in summary.classes]
    return float(math.exp(log_sum(np.array(terms))))


# ---------------------------------------------------------------------------
# theta-pressure, jump points and spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaSchedule:
    """Geometric scales ``delta_j = delta_0 * rho**j`` (j < count), held as logs."""

    log_delta0: float
    rho: float
    count: int
    window: int

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if self.count < 2 * self.window or self.window < 1:
            raise ValueError("schedule needs count >= 2 * window >= 2")

    @property
    def log_deltas(self) -> np.ndarray:
        return self.log_delta0 + np.arange(self.count) * math.log(self.rho)

    @classmethod
    def for_depths(cls, spec: SystemSpec, k_max: int, window: int,
                   rho: float = None, max_count: int = 5_000_000) -> "DeltaSchedule":
        """Scales matching the depth window of :func:`moranspec.pressure.jump_points`.

        The scales run down to ``m_{k_max} |J|``; the trailing window holds the
        scales with ``k_delta`` in ``(k_max - window, k_max]``.  ``rho``
        defaults to ``sqrt(c_max)``.
        """
        if k_max < 2 * window or window < 1:
            raise ValueError("k_max must be at least 2 * window >= 2")
        tab = level_table(spec, k_max)
        log_m = spec.log_diameter + np.cumsum(tab.log_min)
        if rho is None:
            rho = math.exp(0.5 * float(np.max(tab.log_max)))
        step = math.log(rho)
        stop = float(log_m[-1])
        n_win = int(math.floor((stop - float(log_m[k_max - window - 1])) / step))
        n_all = int(math.floor((stop - float(log_m[k_max - 2 * window])) / step)) + 1
        count = max(n_all, 2 * n_win)
        if count > max_count:
            raise ValueError(f"schedule would need {count} scales (limit {max_count}); "
                             "use a shallower depth window")
        # never start above the first-level scale (delta must stay below |J|)
        count = min(count, int(math.floor((stop - float(log_m[0])) / step)) + 1)
        n_win = max(1, min(n_win, count // 2))
        if count < 2:
            raise ValueError("depth window too shallow for this rho")
        return cls(stop - (count - 1) * step, rho, count, n_win)


class _ThetaSolver:
    """Optimal log-costs over a scale schedule, prepared once for many t."""

    def __init__(self, spec: SystemSpec, theta: float, log_deltas: np.ndarray,
                 rho: float, depth_cap: int = 200_000, memo_budget: int = 200_000):
        if not 0.0 < theta <= 1.0:
            raise ValueError("theta must lie in (0, 1]")
        _check_delta(spec, float(log_deltas[0]))
        depth = _depth_needed(spec, float(log_deltas[-1]) / theta, depth_cap)
        log_cmax = float(np.max(level_table(spec, depth).log_max))
        if not math.log(rho) > log_cmax:
            raise ValueError(f"rho={rho} must exceed the largest ratio {math.exp(log_cmax):.6g}")
        self.log_deltas = log_deltas
        self.uniform = _uniform_applicable(spec, depth)
        if self.uniform:
            tab = level_table(spec, depth)
            self.L = np.cumsum(tab.log_r[:, 0])
            self.A = np.cumsum(tab.log_m[:, 0])
            log_d = spec.log_diameter + self.L
            self.lo = _snap_first_le(log_d, log_deltas)
            self.hi = _snap_first_le(log_d, log_deltas / theta)
            self.k_deltas = self.lo + 1
        else:
            self.layers = [_explore(spec, float(ld), theta, memo_budget, depth_cap)
                           for ld in log_deltas]
            self.k_deltas = np.array([k_delta(spec, log_delta=float(ld)) for ld in log_deltas])

    def costs(self, ts) -> np.ndarray:
        """(n_delta, n_t) array of log min-costs."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self.uniform:
            g = self.A[:, None] + self.L[:, None] * ts[None, :]
            return _RangeMin(g).query(self.lo, self.hi)
        return np.array([_backward(layers, ts)[0][0][0] for layers in self.layers])

    def values(self, ts) -> np.ndarray:
        return self.costs(ts) / self.k_deltas[:, None]


def _solver(spec, theta, schedule: DeltaSchedule) -> _ThetaSolver:
    return _ThetaSolver(spec, theta, schedule.log_deltas, schedule.rho)


@dataclass(frozen=True)
class ThetaPressure:
    upper: float
    lower: float
    trace: tuple  # (log_delta, k_delta, log_min_cost)


def theta_pressure(spec: SystemSpec, t: float, theta: float,
                   schedule: DeltaSchedule) -> ThetaPressure:
    """Windowed extremes of (1/k_delta) log min-cost over the scale schedule."""
    if t < 0:
        raise ValueError("t must be non-negative")
    solver = _solver(spec, theta, schedule)
    best = solver.costs([t])[:, 0]
    vals = best / solver.k_deltas
    tail = vals[-schedule.window:]
    trace = tuple((float(ld), int(k), float(c))
                  for ld, k, c in zip(schedule.log_deltas, solver.k_deltas, best))
    return ThetaPressure(float(tail.max()), float(tail.min()), trace)


@dataclass(frozen=True)
class ThetaJumpResult:
    theta: float
    s_upper: float
    s_lower: float
    upper_width: float
    lower_width: float
    degenerate_upper: bool = False
    degenerate_lower: bool = False
    k_delta_max: int = 0


def _theta_roots(solver, window, tol, cap, count=None):
    n = len(solver.log_deltas) if count is None else count

    def upper(ts):
        return solver.values(ts)[:n][-window:].max(axis=0)

    def lower(ts):
        return solver.values(ts)[:n][-window:].min(axis=0)

    a_u, b_u = multisect(upper, 0.0, cap, tol)
    a_l, b_l = multisect(lower, 0.0, cap, tol)
    return 0.5 * (a_u + b_u), b_u - a_u, 0.5 * (a_l + b_l), b_l - a_l


def theta_jump_points(spec: SystemSpec, theta: float, tol: float,
                      schedule: DeltaSchedule, cap: Optional[float] = None,
                      degenerate_ratio: float = 0.75,
                      degenerate_floor: float = 0.05) -> ThetaJumpResult:
    """Sign changes in t of the windowed theta-pressure proxies.

    Degenerate roots are mapped to 0 by the same half-depth test as
    :func:`moranspec.pressure.jump_points`, using the first half of the schedule.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cap = float(spec.dimension if cap is None else cap)
    solver = _solver(spec, theta, schedule)
    su, wu, sl, wl = _theta_roots(solver, schedule.window, tol, cap)
    hu, _, hl, _ = _theta_roots(solver, max(1, schedule.window // 2), tol, cap,
                                count=schedule.count // 2)

    def degenerate(s, s_half):
        return bool(s < degenerate_floor and s <= degenerate_ratio * s_half + tol)

    deg_u, deg_l = degenerate(su, hu), degenerate(sl, hl)
    return ThetaJumpResult(theta, 0.0 if deg_u else su, 0.0 if deg_l else sl, wu, wl,
                           deg_u, deg_l, int(solver.k_deltas.max()))


@dataclass(frozen=True)
class SpectrumCurve:
    """Intermediate-dimension estimates on a theta grid with solver metadata.

    ``lipschitz`` is the constant ``L`` of the continuity budget
    ``L * h + 4 * tol`` for adjacent grid points (``d / min(theta)``);
    ``flags`` lists grid indices whose step to the next point exceeds it.
    """

    theta_grid: tuple
    s_upper: tuple
    s_lower: tuple
    schedule: DeltaSchedule
    tol: float
    s_star: float
    s_lower_star: float
    hausdorff: float
    lipschitz: float
    flags: tuple
    k_delta_max: int
    log_delta_min: float
    points: tuple = ()

    def rows(self):
        return list(zip(self.theta_grid, self.s_upper, self.s_lower))


def spectrum(spec: SystemSpec, theta_grid: Sequence[float], tol: float,
             schedule: DeltaSchedule, k_max: int = 2000, window: int = 500,
             workers: Optional[int] = None) -> SpectrumCurve:
    """Upper and lower intermediate-dimension estimates over ``theta_grid``.

    The endpoint anchors come from :func:`moranspec.pressure.jump_points`
    with ``(k_max, window)``.
    """
    grid = [float(x) for x in theta_grid]
    if not grid or any(not 0.0 < x <= 1.0 for x in grid):
        raise ValueError("theta grid must lie in (0, 1]; theta = 0 is the Hausdorff dimension")
    if grid != sorted(grid):
        raise ValueError("theta grid must be sorted ascending")
    run = lambda th: theta_jump_points(spec, th, tol, schedule)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            res = list(pool.map(run, grid))
    else:
        res = [run(th) for th in grid]
    anchors = jump_points(spec, k_max, window, tol)
    d = float(spec.dimension)
    lip = d / min(grid)
    flags = []
    for i in range(len(grid) - 1):
        h = grid[i + 1] - grid[i]
        if abs(res[i + 1].s_upper - res[i].s_upper) > lip * h + 4 * tol:
            flags.append(i)
    return SpectrumCurve(
        theta_grid=tuple(grid), s_upper=tuple(r.s_upper for r in res),
        s_lower=tuple(r.s_lower for r in res), schedule=schedule, tol=tol,
        s_star=anchors.s_upper, s_lower_star=anchors.s_lower, hausdorff=anchors.s_lower,
        lipschitz=lip, flags=tuple(flags), k_delta_max=max(r.k_delta_max for r in res),
        log_delta_min=float(schedule.log_deltas[-1]), points=tuple(res))
