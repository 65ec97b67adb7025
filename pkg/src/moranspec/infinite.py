"""Finite subsystems of infinite systems and checks of their hypotheses.

Levels given by an analytic family are cut to their first ``K`` maps, with
``K`` the smallest index whose tail is at most ``delta`` times the kept head
at the planning exponents.  Cut indices follow a staircase of slacks over
blocks of levels, and every cut can be re-verified against the closed-form
sums.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy.special import zeta

from ._numerics import TIE_RTOL, compare_logs
from .pressure import jump_points, pressure
from .system import (AnalyticFamily, LevelSpec, SystemSpec, Truncated, Verdict,
                     level_table, materialize_level, window_verdict)


class DivergentSumError(ValueError):
    """The level sum diverges at the planning exponent."""


class HypothesisFailedError(ValueError):
    pass


class Provenance(str, enum.Enum):
    IDENTITY = "identity"
    COVERAGE = "coverage-rule"
    RATIO_PRUNE = "ratio-prune"
    COMBINED = "combined"


# ---------------------------------------------------------------------------
# Single-level truncation
# ---------------------------------------------------------------------------

def _geometric_cut(decay: float, t: float, delta: float) -> int:
    # tail/head = q**K / (1 - q**K) <= delta  <=>  q**K <= delta / (1 + delta)
    lq = t * math.log(decay)
    bound = math.log(delta) - math.log1p(delta)
    x = bound / lq
    K = math.ceil(x)
    if K - 1 >= 1 and abs(x - (K - 1)) <= TIE_RTOL * max(1.0, x):
        K -= 1
    return max(1, K)


def _power_cut(s: float, t: float, delta: float, log_scale: float) -> int:
    """Smallest K with zeta(s, K+1) <= delta/(1+delta) * zeta(s)."""
    target = delta / (1.0 + delta) * float(zeta(s))

    def ok(K):
        return float(zeta(s, K + 1)) <= target * (1 + TIE_RTOL)

    # integral bound: zeta(s, K+1) <= K**(1-s) / (s-1)
    hi = max(1, math.ceil((target * (s - 1.0)) ** (1.0 / (1.0 - s))))
    while not ok(hi):
        hi *= 2
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return max(1, hi)


def truncate_level(level: LevelSpec, t: float, delta: float) -> int:
    """Cut index K: the smallest K >= 1 with tail_{>K} <= delta * head_{<=K} at ``t``.

    Finite levels return their cardinality (nothing is cut).
    """
    if not delta > 0:
        raise ValueError("slack must be positive")
    if level.is_finite:
        return level.cardinality
    fam: AnalyticFamily = level.family
    if not math.isfinite(fam.log_sum(t)):
        raise DivergentSumError(
            f"level sum diverges at t={t:g}; this exponent belongs to the head-divergence "
            "branch and cannot be covered by a finite head")
    if math.isinf(delta):
        return 1
    if fam.kind == "geometric":
        return _geometric_cut(fam.decay, t, delta)
    return _power_cut(t * fam.decay, t, delta, fam.log_scale)


def head_level(level: LevelSpec, K: int) -> LevelSpec:
    """The first ``K`` maps of a level (ratios in decreasing order)."""
    if level.is_finite:
        if K >= level.cardinality:
            return level
        groups, left = [], K
        for lr, m in level.groups:
            take = min(m, left)
            groups.append((lr, take))
            left -= take
            if left == 0:
                break
        return LevelSpec(groups=tuple(groups), truncated=True)
    lr = level.family.log_ratio(np.arange(1, K + 1))
    return LevelSpec(groups=tuple((float(x), 1) for x in lr), truncated=True)


def coverage_holds(level: LevelSpec, K: int, t: float, delta: float) -> tuple:
    """(log full sum, log((1 + delta) * kept sum), holds) at exponent ``t``."""
    if level.is_finite:
        full = float(level.log_sum(t))
        kept = float(head_level(level, K).log_sum(t))
    else:
        full = float(level.family.log_sum(t))
        kept = level.family.log_head(t, K)
    rhs = kept + math.log1p(delta)
    return full, rhs, compare_logs(full, rhs) <= 0


def ratio_prune(level: LevelSpec, t0: float, alpha: float) -> LevelSpec:
    """Keep the maps with ratio >= max ratio / (alpha * #I**(1/t0)).

    The kept spread max/min is then at most ``alpha * #I**(1/t0)``.
    """
    if not t0 > 0 or not alpha > 0:
        raise ValueError("t0 and alpha must be positive")
    if not level.is_finite or math.isinf(alpha):
        return level
    thr = level.log_max_ratio - math.log(alpha) - level.log_cardinality / t0
    kept = tuple((lr, m) for lr, m in level.groups if compare_logs(lr, thr) >= 0)
    if kept == level.groups:
        return level
    return LevelSpec(groups=kept, truncated=True)


# ---------------------------------------------------------------------------
# Plans and subsystems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationPlan:
    """Staircase of slacks: ``blocks[i] = (first_level, delta_i)``.

    Every level is cut with the slack of the block containing it, at the
    largest index required by any planning exponent in ``t_values``.  An
    optional ratio prune ``(t0, alpha)`` is applied after the cut.
    """

    blocks: tuple
    t_values: tuple
    provenance: Provenance = Provenance.COVERAGE
    prune: Optional[tuple] = None
    distortion_constant: float = 1.0
    dimension: int = 1

    def __post_init__(self):
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        blocks = tuple((int(n), float(d)) for n, d in self.blocks)
        if not blocks or blocks[0][0] != 1:
            raise ValueError("the first block must start at level 1")
        if any(b[0] >= c[0] for b, c in zip(blocks, blocks[1:])):
            raise ValueError("block starts must increase")
        if any(not d > 0 for _, d in blocks):
            raise ValueError("slacks must be positive")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "t_values", tuple(float(t) for t in self.t_values))

    @classmethod
    def identity(cls) -> "TruncationPlan":
        return cls(blocks=((1, math.inf),), t_values=(), provenance=Provenance.IDENTITY)

    def slack(self, k: int) -> float:
        d = self.blocks[0][1]
        for start, delta in self.blocks:
            if start <= k:
                d = delta
        return d

    def defect_bound(self, k: int) -> float:
        """Guaranteed lower-pressure defect ``delta * D**(2d)`` at level ``k``."""
        return self.slack(k) * self.distortion_constant ** (2 * self.dimension)

    def cut_index(self, level: LevelSpec, k: int) -> int:
        if level.is_finite or self.provenance is Provenance.IDENTITY:
            return level.cardinality
        delta = self.slack(k)
        return max(truncate_level(level, t, delta) for t in self.t_values)

    def truncate(self, level: LevelSpec, k: int) -> LevelSpec:
        if self.provenance is Provenance.IDENTITY:
            return level
        out = head_level(level, self.cut_index(level, k))
        if self.prune is not None:
            out = ratio_prune(out, *self.prune)
        return out


def _finite_prefix(spec: SystemSpec, n: int) -> bool:
    return all(materialize_level(spec, k).is_finite for k in range(1, n + 1))


def build_subsystem(spec: SystemSpec, t_grid: Sequence[float], slacks: Sequence[float],
                    block_length: int = 64, eps_grid: Sequence[float] = (0.5, 1.0),
                    n_check: int = 256, window: int = 64,
                    prune: Optional[tuple] = None):
    """Finite subsystem of ``spec`` and the plan that produced it.

    Levels in the ``i``-th block of ``block_length`` levels use slack
    ``slacks[i]`` (the last slack continues forever).  The planning exponents
    are the grid points with finite level sums.  Refuses when the hypothesis
    check on ``t_grid`` reports a failure.
    """
    if _finite_prefix(spec, n_check):
        return spec, TruncationPlan.identity()
    if not slacks:
        raise ValueError("need at least one slack")
    report = infinite_condition_check(spec, t_grid, eps_grid, n_check, window)
    failing = report.failures()
    if failing:
        raise HypothesisFailedError("hypothesis check failed: " + "; ".join(failing))
    planning = [t for t, fin in zip(report.t_grid, report.finite) if fin == "finite"]
    if not planning:
        raise HypothesisFailedError("no exponent in the grid has finite level sums")
    blocks = tuple((1 + i * block_length, d) for i, d in enumerate(slacks))
    plan = TruncationPlan(blocks=blocks, t_values=tuple(planning),
                          provenance=Provenance.COMBINED if prune else Provenance.COVERAGE,
                          prune=tuple(prune) if prune else None,
                          distortion_constant=spec.distortion_constant,
                          dimension=spec.dimension)
    sub = SystemSpec(tail=Truncated(spec, plan), ambient_diameter=spec.ambient_diameter,
                     distortion_constant=spec.distortion_constant,
                     separation=spec.separation, gap_fraction=spec.gap_fraction,
                     dimension=spec.dimension, name=f"{spec.label()}-truncated")
    return sub, plan


def verify_coverage(spec: SystemSpec, plan: TruncationPlan, k_max: int) -> list:
    """Rows ``(k, t, log full, log (1+delta) kept, holds)`` for every planned level and t."""
    rows = []
    for k in range(1, k_max + 1):
        level = materialize_level(spec, k)
        if level.is_finite:
            continue
        K = plan.cut_index(level, k)
        for t in plan.t_values:
            rows.append((k, t, *coverage_holds(level, K, t, plan.slack(k))))
    return rows


# ---------------------------------------------------------------------------
# Hypothesis check for infinite systems
# ---------------------------------------------------------------------------

def _log_head_big(fam: AnalyticFamily, t: float, log_K: float) -> float:
    """log of the sum over j <= exp(log_K), also when the bound exceeds float range."""
    if log_K < 0:
        return -math.inf
    if log_K < 40:
        return fam.log_head(t, math.floor(math.exp(log_K)))
    if fam.kind == "geometric":
        # q**K underflows: the head is the full sum
        return float(fam.log_sum(t))
    K = int(mpmath.floor(mpmath.exp(log_K)))
    s = t * fam.decay
    if s == 1:
        h = mpmath.digamma(K + 1) + mpmath.euler
    elif s > 1:
        h = mpmath.zeta(s) - mpmath.zeta(s, K + 1)
    else:
        # sum_{j<=K} j**-s ~ zeta(s) + K**(1-s)/(1-s) for s < 1
        h = mpmath.zeta(s) - mpmath.zeta(s, K + 1)
    return t * fam.log_scale + float(mpmath.log(h))


@dataclass(frozen=True)
class ConditionEntry:
    t: float
    eps: float
    branch: str  # "finite" (head fraction -> 1) or "divergent" (head -> inf)
    sequence: np.ndarray  # must tend to 0
    verdict: Verdict


@dataclass(frozen=True)
class InfiniteConditionReport:
    t_grid: tuple
    eps_grid: tuple
    finite: tuple  # per t: "finite", "divergent" or "mixed"
    uniformity: tuple  # per t: Verdict for finiteness uniformity
    entries: tuple
    vacuous: bool = False

    def failures(self) -> list:
        out = [f"level sums at t={t:g} are finite for some levels and infinite for others"
               for t, v in zip(self.t_grid, self.uniformity) if v is Verdict.FAILS]
        for e in self.entries:
            if e.verdict is Verdict.FAILS:
                what = "head fraction does not tend to 1" if e.branch == "finite" \
                    else "head sum does not diverge"
                out.append(f"{what} at t={e.t:g}, eps={e.eps:g}")
        return out

    def verdict(self) -> Verdict:
        vs = list(self.uniformity) + [e.verdict for e in self.entries]
        if any(v is Verdict.FAILS for v in vs):
            return Verdict.FAILS
        if all(v is Verdict.HOLDS for v in vs):
            return Verdict.HOLDS
        return Verdict.INCONCLUSIVE


def infinite_condition_check(spec: SystemSpec, t_grid: Sequence[float],
                             eps_grid: Sequence[float], n_max: int, window: int = 64,
                             hold_threshold: float = 0.01,
                             fail_threshold: float = 0.1) -> InfiniteConditionReport:
    """Finite-prefix check of the hypotheses on infinite levels.

    For each ``t``: level sums must be all finite or all infinite.  For finite
    sums the head ``sum_{j <= M_n**-eps}`` over the full sum must tend to 1;
    for infinite sums the head must tend to infinity (``1/head -> 0``).
    ``M_n`` is the largest depth-``n`` word ratio.
    """
    ts = tuple(float(t) for t in t_grid)
    eps = tuple(float(e) for e in eps_grid)
    if _finite_prefix(spec, n_max):
        return InfiniteConditionReport(ts, eps, tuple("finite" for _ in ts),
                                       tuple(Verdict.HOLDS for _ in ts), (), vacuous=True)
    if n_max < 2 * window:
        raise ValueError("n_max must be at least 2 * window")
    levels = [materialize_level(spec, k) for k in range(1, n_max + 1)]
    log_M = np.cumsum([lv.log_max_ratio for lv in levels])
    finite, uniform, entries = [], [], []
    for t in ts:
        sums = np.array([lv.log_sum(t) for lv in levels], dtype=float)
        fin = np.isfinite(sums)
        if fin.all():
            finite.append("finite")
            uniform.append(Verdict.HOLDS)
        elif not fin.any():
            finite.append("divergent")
            uniform.append(Verdict.HOLDS)
        else:
            finite.append("mixed")
            uniform.append(Verdict.FAILS)
            continue
        for e in eps:
            heads = []
            for lv, lm in zip(levels, log_M):
                log_K = -e * lm
                if lv.is_finite:
                    K = math.floor(math.exp(min(log_K, 700.0)))
                    heads.append(float(head_level(lv, max(K, 0)).log_sum(t)) if K >= 1 else -math.inf)
                else:
                    heads.append(_log_head_big(lv.family, t, log_K))
            heads = np.array(heads)
            if finite[-1] == "finite":
                seq = -np.expm1(heads - sums)
                branch = "finite"
            else:
                seq = np.exp(-heads)
                branch = "divergent"
            entries.append(ConditionEntry(t, e, branch, seq,
                                          window_verdict(seq, window, hold_threshold,
                                                         fail_threshold)))
    return InfiniteConditionReport(ts, eps, tuple(finite), tuple(uniform), tuple(entries))


# ---------------------------------------------------------------------------
# m_Phi: infimum of the positive values of the lower pressure
# ---------------------------------------------------------------------------

class MPhiStatus(str, enum.Enum):
    ATTAINED = "attained"
    LIMIT = "limit"
    INCONCLUSIVE = "inconclusive"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class MPhiEstimate:
    value: Optional[float]
    status: MPhiStatus
    t_grid: tuple
    values: tuple
    lipschitz: float
    growth_ratio: Optional[float] = None
    growth_verdict: Verdict = Verdict.INCONCLUSIVE


def classify(t_grid: Sequence[float], values: Sequence[float], lipschitz: float,
             tol: float = 1e-9) -> tuple:
    """(m estimate, status) from lower-pressure values on an ascending grid.

    The smallest positive value is attained when the next value drops by more
    than the continuity budget ``lipschitz * h`` to ``-inf``; a drop within the
    budget means the pressure passes continuously through 0 and the infimum is
    0 in the limit.  Other patterns are inconclusive.
    """
    t = np.asarray(t_grid, dtype=float)
    v = np.asarray(values, dtype=float)
    if np.any(np.diff(t) <= 0):
        raise ValueError("t grid must be strictly increasing")
    pos = np.flatnonzero(v > 0)
    if pos.size == 0:
        return None, MPhiStatus.UNDEFINED
    finite = np.isfinite(v)
    steps = np.diff(v[finite])
    if np.any(steps > tol * np.maximum(1.0, np.abs(v[finite][1:]))):
        return float(v[pos].min()), MPhiStatus.INCONCLUSIVE
    j = int(pos.max())
    if j == len(v) - 1:
        return float(v[j]), MPhiStatus.INCONCLUSIVE
    if v[j + 1] == -np.inf:
        return float(v[j]), MPhiStatus.ATTAINED
    budget = lipschitz * (t[j + 1] - t[j])
    if v[j] - v[j + 1] <= budget * (1 + tol) + tol:
        return 0.0, MPhiStatus.LIMIT
    return float(v[j]), MPhiStatus.INCONCLUSIVE


def m_phi_estimate(spec: SystemSpec, t_grid: Sequence[float], k_max: int, window: int,
                   margin: float = 0.05, growth_factor: float = 1.5,
                   divergence_floor: float = 1.0) -> MPhiEstimate:
    """Estimate of inf{P_(t) : P_(t) > 0} from lower-pressure proxies.

    The grid always includes ``t = 0``.  When the lower pressure is
    degenerate (``-inf`` for every ``t > 0``) the positive proxies are
    replaced by ``-inf``.  A proxy of modulus at least ``divergence_floor``
    that has grown by ``growth_factor`` or more since half depth is taken as
    an infinite pressure of the same sign.  Also evaluates the growth hypothesis
    ``limsup log #I_k / (k m) < 1`` (per-level cardinality) on the trailing window.
    """
    grid = sorted({0.0, *(float(t) for t in t_grid)})
    vals = [pressure(spec, t, k_max, window).lower_est for t in grid]
    if jump_points(spec, k_max, window).degenerate_lower:
        vals = [v if t == 0.0 else -math.inf for t, v in zip(grid, vals)]
    # proxies still growing linearly with depth belong to an infinite pressure
    half = [pressure(spec, t, k_max // 2, max(1, window // 2)).lower_est for t in grid]
    vals = [math.copysign(math.inf, v)
            if math.isfinite(v) and v * h > 0 and abs(v) >= divergence_floor
            and abs(v) >= growth_factor * abs(h) else v
            for v, h in zip(vals, half)]
    tab = level_table(spec, k_max)
    if tab.families:
        lip = math.inf
    else:
        avg = -np.cumsum(tab.log_min) / np.arange(1, k_max + 1)
        lip = float(avg[-window:].max())
    value, status = classify(grid, vals, lip)
    ratio, verdict = None, Verdict.INCONCLUSIVE
    if value is not None and not tab.families:
        # a zero infimum (limit case) leaves the hypothesis undecided
        growth = float((tab.log_card / np.arange(1, k_max + 1))[-window:].max())
        if value > 0:
            ratio = growth / value
            verdict = (Verdict.HOLDS if ratio < 1 - margin else
                       Verdict.FAILS if ratio > 1 + margin else Verdict.INCONCLUSIVE)
    return MPhiEstimate(value, status, tuple(grid), tuple(float(v) for v in vals), lip,
                        ratio, verdict)
