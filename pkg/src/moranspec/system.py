"""Non-autonomous system declarations, level materialisation and diagnostics.

Every contraction ratio is held as a natural log.  Level contents are
multisets stored as ``(log_ratio, multiplicity)`` groups, so levels with
``2**k`` equal maps cost one entry.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import zeta

from ._numerics import log_sum


class InvalidSystemError(ValueError):
    """A declared level or system violates a structural requirement."""


class DepthRangeError(OverflowError):
    """A level rule cannot be evaluated in floating point at this depth."""

    def __init__(self, k, detail=""):
        super().__init__(f"depth exceeds representable range at level {k}"
                         + (f": {detail}" if detail else ""))
        self.k = k


# ---------------------------------------------------------------------------
# Levels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticFamily:
    """Countable family ``c_j`` (j = 1, 2, ...) with closed-form power sums.

    ``kind="geometric"``: ``c_j = scale * decay**j`` with ``0 < decay < 1``.
    ``kind="power"``:     ``c_j = scale * j**(-decay)`` with ``decay > 0``.
    ``log_scale`` is ``log(scale)``.
    """

    kind: str
    log_scale: float
    decay: float

    def __post_init__(self):
        if self.kind not in ("geometric", "power"):
            raise InvalidSystemError(f"unknown analytic family {self.kind!r}")
        if self.kind == "geometric" and not 0.0 < self.decay < 1.0:
            raise InvalidSystemError("geometric decay must lie in (0, 1)")
        if self.kind == "power" and not self.decay > 0.0:
            raise InvalidSystemError("power-law exponent must be positive")
        if not math.isfinite(self.log_scale):
            raise InvalidSystemError("analytic family scale must be finite and positive")
        if not self.log_max_ratio < 0.0:
            raise InvalidSystemError(
                f"analytic family supremum ratio {math.exp(self.log_max_ratio):.6g} >= 1")

    @property
    def log_max_ratio(self) -> float:
        if self.kind == "geometric":
            return self.log_scale + math.log(self.decay)
        return self.log_scale

    @property
    def convergence_exponent(self) -> float:
        """Infimum of t at which the power sum is finite."""
        return 0.0 if self.kind == "geometric" else 1.0 / self.decay

    def log_ratio(self, j):
        j = np.asarray(j, dtype=float)
        if self.kind == "geometric":
            return self.log_scale + j * math.log(self.decay)
        return self.log_scale - self.decay * np.log(j)

    def log_sum(self, t):
        """log sum_j c_j**t; ``+inf`` where the series diverges."""
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, np.inf)
        if self.kind == "geometric":
            ok = t > 0
            lq = t[ok] * math.log(self.decay)
            out[ok] = t[ok] * self.log_scale + lq - np.log(-np.expm1(lq))
        else:
            s = t * self.decay
            ok = s > 1
            out[ok] = t[ok] * self.log_scale + np.log(zeta(s[ok]))
        return out if out.ndim else float(out)

    def log_tail(self, t: float, K: float) -> float:
        """log sum_{j > K} c_j**t for finite sums (K may be huge)."""
        if K < 0:
            raise ValueError("K must be non-negative")
        if self.kind == "geometric":
            if t <= 0:
                return math.inf
            lq = t * math.log(self.decay)
            if math.isinf(K):
                return -math.inf
            return t * self.log_scale + (math.floor(K) + 1) * lq - math.log(-math.expm1(lq))
        s = t * self.decay
        if s <= 1:
            return math.inf
        if math.isinf(K):
            return -math.inf
        return t * self.log_scale + math.log(float(zeta(s, math.floor(K) + 1)))

    def log_head(self, t: float, K: float) -> float:
        """log sum_{j <= K} c_j**t; finite for every finite K >= 1."""
        K = math.floor(K)
        if K < 1:
            return -math.inf
        if self.kind == "geometric":
            lq = t * math.log(self.decay)
            if lq == 0.0:
                return t * self.log_scale + math.log(K)
            # q (1 - q^K) / (1 - q)
            return (t * self.log_scale + lq + math.log(-math.expm1(K * lq))
                    - math.log(-math.expm1(lq)))
        import mpmath

        s = t * self.decay
        if K <= 10_000:
            j = np.arange(1, K + 1, dtype=float)
            return t * self.log_scale + float(log_sum(-s * np.log(j)))
        if s == 1:
            h = mpmath.digamma(K + 1) + mpmath.euler
        else:
            h = mpmath.zeta(s) - mpmath.zeta(s, K + 1)
        return t * self.log_scale + float(mpmath.log(h))


Group = tuple  # (log_ratio: float, multiplicity: int)


@dataclass(frozen=True)
class LevelSpec:
    """One level: finite ratio groups, or an analytic infinite family.

    ``groups`` holds ``(log_ratio, multiplicity)`` pairs sorted by ratio,
    descending, with equal ratios merged.  ``truncated`` marks subsystem
    levels that may hold a single map.
    """

    groups: tuple = ()
    family: Optional[AnalyticFamily] = None
    truncated: bool = False

    def __post_init__(self):
        if self.family is not None:
            if self.groups:
                raise InvalidSystemError("a level is either grouped or analytic, not both")
            return
        merged: dict = {}
        for lr, m in self.groups:
            lr = float(lr)
            if not isinstance(m, (int, np.integer)) or m < 1:
                raise InvalidSystemError(f"multiplicity must be a positive integer, got {m!r}")
            if math.isnan(lr):
                raise InvalidSystemError("ratio is NaN")
            if math.isinf(lr):
                raise DepthRangeError("?", "ratio underflows to zero")
            if not lr < 0.0:
                raise InvalidSystemError(f"ratio {math.exp(lr):.6g} not in (0, 1)")
            merged[lr] = merged.get(lr, 0) + int(m)
        groups = tuple(sorted(merged.items(), key=lambda g: -g[0]))
        if not groups:
            raise InvalidSystemError("empty level")
        total = sum(m for _, m in groups)
        if total < 2 and not self.truncated:
            raise InvalidSystemError(
                "a declared level needs at least two maps (single-map levels only in truncated subsystems)")
        object.__setattr__(self, "groups", groups)

    @classmethod
    def from_ratios(cls, pairs, truncated=False) -> "LevelSpec":
        """Build from ``(ratio, multiplicity)`` pairs given as plain ratios."""
        out = []
        for r, m in pairs:
            if not 0.0 < r < 1.0:
                raise InvalidSystemError(f"ratio {r!r} not in (0, 1)")
            out.append((math.log(r), m))
        return cls(groups=tuple(out), truncated=truncated)

    @classmethod
    def analytic(cls, kind, scale, decay) -> "LevelSpec":
        return cls(family=AnalyticFamily(kind, math.log(scale), decay))

    @property
    def is_finite(self) -> bool:
        return self.family is None

    @property
    def cardinality(self):
        if self.family is not None:
            return math.inf
        return sum(m for _, m in self.groups)

    @property
    def log_cardinality(self) -> float:
        if self.family is not None:
            return math.inf
        return math.log(self.cardinality)

    @property
    def log_max_ratio(self) -> float:
        if self.family is not None:
            return self.family.log_max_ratio
        return self.groups[0][0]

    @property
    def log_min_ratio(self) -> float:
        """``-inf`` for analytic families (ratios accumulate at 0)."""
        if self.family is not None:
            return -math.inf
        return self.groups[-1][0]

    @property
    def ratios(self):
        return [(math.exp(lr), m) for lr, m in self.groups]

    def log_sum(self, t):
        """log sum_j c_j**t for scalar or array ``t``."""
        if self.family is not None:
            return self.family.log_sum(t)
        t = np.asarray(t, dtype=float)
        lr = np.array([g[0] for g in self.groups])
        lm = np.array([math.log(g[1]) for g in self.groups])
        out = log_sum(lm[:, None] + lr[:, None] * t.reshape(1, -1), axis=0)
        return out.reshape(t.shape) if t.ndim else float(out[0])


# ---------------------------------------------------------------------------
# Tail rules
# ---------------------------------------------------------------------------

_LOG2 = math.log(2.0)
_LOG3 = math.log(3.0)


def _rule_homogeneous(k, ratio=1 / 3, branches=2):
    return LevelSpec(groups=((math.log(ratio), int(branches)),))


def _rule_e1(k):
    return LevelSpec(groups=((-(k + 1) * _LOG3, 2 ** k),))


def _rule_e2(k):
    return LevelSpec(groups=((-(k + 1) * _LOG3, 1), (-k * (k + 1) * _LOG3, 2 ** k - 1)))


def _rule_e3(k):
    # c_1 = 1/2, c_2 = 1/4, c_k = c_1 ... c_{k-1}: exponent of 2 is 3 * 2**(k-3) for k >= 3
    e = 1 if k == 1 else 2 if k == 2 else 3 * 2 ** (k - 3)
    try:
        lr = -float(e) * _LOG2
    except OverflowError:
        raise DepthRangeError(k, "ratio exponent overflows") from None
    if math.isinf(lr):
        raise DepthRangeError(k, "ratio exponent overflows")
    return LevelSpec(groups=((lr, 2),))


def _rule_block_alternating(k, first=0.5, second=0.25, branches=2):
    # block b covers levels [2**b, 2**(b+1)); even blocks use `first`
    b = k.bit_length() - 1
    r = first if b % 2 == 0 else second
    return LevelSpec(groups=((math.log(r), int(branches)),))


def _rule_geometric_family(k, level_scale=0.5, decay=0.5):
    return LevelSpec(family=AnalyticFamily("geometric", k * math.log(level_scale), decay))


def _rule_power_family(k, scale=0.5, level_scale=1.0, exponent=2.0):
    return LevelSpec(family=AnalyticFamily(
        "power", math.log(scale) + k * math.log(level_scale), exponent))


RULES: dict[str, Callable[..., LevelSpec]] = {
    "homogeneous": _rule_homogeneous,
    "E1": _rule_e1,
    "E2": _rule_e2,
    "E3": _rule_e3,
    "block_alternating": _rule_block_alternating,
    "geometric_family": _rule_geometric_family,
    "power_family": _rule_power_family,
}


@dataclass(frozen=True)
class Periodic:
    """Repeat ``levels`` cyclically after the explicit prefix."""

    levels: tuple

    def __post_init__(self):
        if not self.levels:
            raise InvalidSystemError("periodic tail needs at least one level")
        object.__setattr__(self, "levels", tuple(self.levels))

    def level(self, k: int, offset: int) -> LevelSpec:
        return self.levels[(k - offset - 1) % len(self.levels)]


@dataclass(frozen=True)
class Rule:
    """Closed-form level rule looked up by name in :data:`RULES`."""

    name: str
    params: tuple = ()

    def __post_init__(self):
        if self.name not in RULES:
            raise InvalidSystemError(f"unknown level rule {self.name!r}")
        params = self.params.items() if isinstance(self.params, dict) else self.params
        object.__setattr__(self, "params", tuple(sorted((str(a), b) for a, b in params)))

    def level(self, k: int, offset: int) -> LevelSpec:
        return RULES[self.name](k, **dict(self.params))


@dataclass(frozen=True)
class Truncated:
    """Keep the first ``plan.cut_index(k)`` maps of each level of ``base``."""

    base: "SystemSpec"
    plan: object  # infinite.TruncationPlan

    def level(self, k: int, offset: int) -> LevelSpec:
        return self.plan.truncate(self.base.level(k), k)


Tail = Union[Periodic, Rule, Truncated, None]


# ---------------------------------------------------------------------------
# System
# ---------------------------------------------------------------------------

class Separation(str, enum.Enum):
    SSC = "SSC"
    OSC = "OSC"


@dataclass(frozen=True)
class SystemSpec:
    """A non-autonomous system given by an explicit prefix and a tail rule.

    ``gap_fraction`` is the interior gap (as a fraction of the parent length)
    used by SSC realisations; ``None`` means equal gaps including both flanks.
    """

    prefix: tuple = ()
    tail: Tail = None
    ambient_diameter: float = 1.0
    distortion_constant: float = 1.0
    separation: Separation = Separation.SSC
    gap_fraction: Optional[float] = None
    dimension: int = 1
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "separation", Separation(self.separation))
        if not self.ambient_diameter > 0:
            raise InvalidSystemError("ambient diameter must be positive")
        if not self.distortion_constant >= 1:
            raise InvalidSystemError("distortion constant must be >= 1")
        if self.gap_fraction is not None and not 0.0 < self.gap_fraction < 1.0:
            raise InvalidSystemError("gap fraction must lie in (0, 1)")
        if self.tail is None and not self.prefix:
            raise InvalidSystemError("system declares no levels")

    def level(self, k: int) -> LevelSpec:
        return materialize_level(self, k)

    @property
    def log_diameter(self) -> float:
        return math.log(self.ambient_diameter)

    @property
    def horizon(self):
        """Number of declared levels (``inf`` when a tail rule exists)."""
        return math.inf if self.tail is not None else len(self.prefix)

    def is_finite(self, k_max: int) -> bool:
        return all(self.level(k).is_finite for k in range(1, k_max + 1))

    def log_c_max(self, k_max: int) -> float:
        """log of the largest ratio over levels 1..k_max."""
        return float(np.max(level_table(self, k_max).log_max))

    def label(self) -> str:
        return self.name or "custom"


@lru_cache(maxsize=200_000)
def _materialize(spec: SystemSpec, k: int) -> LevelSpec:
    if k <= len(spec.prefix):
        return spec.prefix[k - 1]
    if spec.tail is None:
        raise InvalidSystemError(f"level {k} beyond the declared prefix of {len(spec.prefix)}")
    try:
        level = spec.tail.level(k, len(spec.prefix))
    except OverflowError as exc:
        if isinstance(exc, DepthRangeError):
            raise DepthRangeError(k, str(exc).split(": ", 1)[-1]) from None
        raise DepthRangeError(k, str(exc)) from None
    return level


def materialize_level(spec: SystemSpec, k: int) -> LevelSpec:
    """Level ``k`` (1-based) of ``spec``; deterministic and cached."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"level index must be a positive integer, got {k!r}")
    return _materialize(spec, int(k))


@dataclass(frozen=True, eq=False)
class LevelTable:
    """Padded arrays for levels 1..k_max.

    Finite levels fill ``log_r``/``log_m`` (padding has ``log_m = -inf``);
    analytic levels are listed in ``families`` and evaluated separately.
    """

    k_max: int
    log_r: np.ndarray
    log_m: np.ndarray
    log_card: np.ndarray
    log_min: np.ndarray
    log_max: np.ndarray
    families: dict = field(default_factory=dict)

    def log_sums(self, t) -> np.ndarray:
        """Array ``(k_max, len(t))`` of log level sums."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = log_sum(self.log_m[:, :, None] + self.log_r[:, :, None] * t[None, None, :], axis=1)
        for i, fam in self.families.items():
            out[i] = fam.log_sum(t)
        return out


@lru_cache(maxsize=64)
def level_table(spec: SystemSpec, k_max: int) -> LevelTable:
    levels = [materialize_level(spec, k) for k in range(1, k_max + 1)]
    width = max((len(lv.groups) for lv in levels), default=1) or 1
    log_r = np.zeros((k_max, width))
    log_m = np.full((k_max, width), -np.inf)
    families = {}
    for i, lv in enumerate(levels):
        if lv.family is not None:
            families[i] = lv.family
            continue
        for j, (lr, m) in enumerate(lv.groups):
            log_r[i, j] = lr
            log_m[i, j] = math.log(m)
    return LevelTable(
        k_max=k_max,
        log_r=log_r,
        log_m=log_m,
        log_card=np.array([lv.log_cardinality for lv in levels]),
        log_min=np.array([lv.log_min_ratio for lv in levels]),
        log_max=np.array([lv.log_max_ratio for lv in levels]),
        families=families,
    )


# ---------------------------------------------------------------------------
# Derived bounds and diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivedLevelBounds:
    """Natural logs of m_k, M_k (extremal word norms) and the level extremes."""

    k: int
    log_m: float
    log_M: float
    log_c_min: float
    log_c_max: float


def derived_bounds(spec: SystemSpec, k_max: int) -> list:
    if k_max < 1:
        raise ValueError("k_max must be positive")
    tab = level_table(spec, k_max)
    if not np.all(tab.log_max < 0):
        raise InvalidSystemError("supremum ratio >= 1")
    log_m = np.cumsum(tab.log_min)
    log_M = np.cumsum(tab.log_max)
    return [DerivedLevelBounds(k + 1, float(log_m[k]), float(log_M[k]),
                               float(tab.log_min[k]), float(tab.log_max[k]))
            for k in range(k_max)]


class Verdict(str, enum.Enum):
    HOLDS = "plausibly-holds"
    FAILS = "plausibly-fails"
    INCONCLUSIVE = "inconclusive"


def window_verdict(seq, window: int, hold_threshold: float, fail_threshold: float) -> Verdict:
    """Verdict for ``seq -> 0`` from its trailing window of absolute values."""
    if seq is None:
        return Verdict.INCONCLUSIVE
    tail = np.abs(np.asarray(seq, dtype=float)[-window:])
    if not np.all(np.isfinite(tail)):
        return Verdict.INCONCLUSIVE
    if tail.max() < hold_threshold:
        return Verdict.HOLDS
    if tail.min() > fail_threshold:
        return Verdict.FAILS
    return Verdict.INCONCLUSIVE


# condition name -> sequence that must tend to 0
CONDITIONS = {
    "min_ratio_vs_diameter": "ratio_A",
    "max_ratio_cardinality": "ratio_B",
    "cardinality_growth": "ratio_C",
    "max_ratio_vs_diameter": "ratio_D",
}


@dataclass(frozen=True)
class DiagnosticsReport:
    k: np.ndarray
    ratio_A: Optional[np.ndarray]
    ratio_B: Optional[np.ndarray]
    ratio_C: Optional[np.ndarray]
    ratio_D: Optional[np.ndarray]
    window: int
    hold_threshold: float
    fail_threshold: float
    summaries: dict
    verdicts: dict

    def sequence(self, name: str):
        return getattr(self, name)

    def rows(self):
        """Rows ``(k, A, B, C, D)`` with NaN for undefined sequences."""
        cols = [s if s is not None else np.full(len(self.k), np.nan)
                for s in (self.ratio_A, self.ratio_B, self.ratio_C, self.ratio_D)]
        return [(int(k), *(float(c[i]) for c in cols)) for i, k in enumerate(self.k)]


def condition_diagnostics(spec: SystemSpec, k_max: int, window: int,
                          hold_threshold: float = 0.01,
                          fail_threshold: float = 0.1) -> DiagnosticsReport:
    """Finite-prefix diagnostics for the asymptotic standing conditions.

    Each condition asks that a ratio sequence tends to 0.  A verdict is
    ``plausibly-holds`` when the trailing-window maximum of its absolute
    value is below ``hold_threshold`` and ``plausibly-fails`` when the
    trailing-window minimum exceeds ``fail_threshold``.
    """
    if k_max < 2 * window:
        raise ValueError("k_max must be at least 2 * window")
    tab = level_table(spec, k_max)
    k = np.arange(1, k_max + 1)
    log_M = np.cumsum(tab.log_max)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio_A = tab.log_min / log_M
        ratio_B = (tab.log_max - tab.log_card) / log_M
        ratio_C = tab.log_card / k
        ratio_D = tab.log_max / log_M

    def defined(x):
        return x if np.all(np.isfinite(x)) else None

    seqs = {"ratio_A": defined(ratio_A), "ratio_B": defined(ratio_B),
            "ratio_C": defined(ratio_C), "ratio_D": defined(ratio_D)}
    summaries = {}
    for name, s in seqs.items():
        if s is None:
            summaries[name] = None
        else:
            tail = s[-window:]
            summaries[name] = {"max": float(tail.max()), "min": float(tail.min()),
                               "last": float(s[-1])}
    verdicts = {cond: window_verdict(seqs[seq], window, hold_threshold, fail_threshold)
                for cond, seq in CONDITIONS.items()}
    return DiagnosticsReport(k=k, window=window, hold_threshold=hold_threshold,
                             fail_threshold=fail_threshold, summaries=summaries,
                             verdicts=verdicts, **seqs)
