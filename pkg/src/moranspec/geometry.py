"""One-dimensional realisations of the attractor and empirical estimators.

Cylinders at depth ``n`` are laid out left to right inside their parents.
Box counts are exact interval arithmetic on a grid anchored at 0, and the
measure scan evaluates ball masses from the piecewise-linear distribution
function of a measure that is uniform on each depth-``n`` interval.
"""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .system import LevelSpec, Separation, SystemSpec, materialize_level

MAX_INTERVALS = 10 ** 7
# relative slack used when snapping endpoints onto grid lines
_GRID_SNAP = 1e-7


class RealizationBudgetError(RuntimeError):
    pass


class InfeasiblePlacementError(ValueError):
    pass


class InsufficientScalesError(ValueError):
    pass


class SaturatedScaleWarning(UserWarning):
    """A box size below the shortest interval: the count only sees the realisation depth."""


class Placement(str, enum.Enum):
    SSC_UNIFORM_GAPS = "SSC-uniform-gaps"
    OSC_LEFT_PACKED = "OSC-left-packed"


@dataclass(frozen=True, eq=False)
class AttractorRealization:
    """Depth-``depth`` cylinder intervals, sorted by left endpoint.

    ``log_weights`` holds ``log w_u`` (product of ratios along the word) for
    the interval in the same row; ``lengths`` is ``|J| * exp(log_weights)``.
    """

    depth: int
    lefts: np.ndarray
    lengths: np.ndarray
    log_weights: np.ndarray
    placement: Placement
    gap_fraction: Optional[float]
    spec: SystemSpec

    @property
    def intervals(self):
        return list(zip(self.lefts.tolist(), self.lengths.tolist()))

    def __len__(self):
        return len(self.lefts)


@dataclass(frozen=True, eq=False)
class MeasureRealization:
    """Weights ``w_u**t / S_n(t)`` of the depth-``n`` cylinders, in interval order."""

    depth: int
    t: float
    weights: np.ndarray


def _flat(level: LevelSpec, k: int) -> np.ndarray:
    if not level.is_finite:
        raise InfeasiblePlacementError(
            f"level {k} is an infinite family; realise a truncated subsystem instead")
    return np.concatenate([np.full(m, lr) for lr, m in level.groups])


def _offsets(log_r: np.ndarray, placement: Placement, gap: Optional[float], k: int):
    """Child left offsets as fractions of the parent length."""
    r = np.exp(log_r)
    total = float(r.sum())
    n = len(r)
    if placement is Placement.OSC_LEFT_PACKED:
        if total > 1.0 + 1e-12:
            raise InfeasiblePlacementError(
                f"level {k}: ratios sum to {total:.6g} > 1, children cannot have disjoint interiors")
        return np.r_[0.0, np.cumsum(r)[:-1]]
    if gap is None:
        if not total < 1.0:
            raise InfeasiblePlacementError(
                f"level {k}: ratios sum to {total:.6g} >= 1, no room for separating gaps")
        gap = flank = (1.0 - total) / (n + 1)
    else:
        flank = 0.5 * (1.0 - total - (n - 1) * gap)
        if flank < -1e-12:
            raise InfeasiblePlacementError(
                f"level {k}: ratios plus gaps sum to {total + (n - 1) * gap:.6g} > 1")
        flank = max(flank, 0.0)
    return flank + np.r_[0.0, np.cumsum(r[:-1] + gap)]


def _check_layout(lefts, lengths, parent_lefts, parent_lengths, reps, strict, k):
    scale = float(lengths.min())
    tol = 1e-9 * scale
    p_left = np.repeat(parent_lefts, reps)
    p_right = p_left + np.repeat(parent_lengths, reps)
    if np.any(lefts < p_left - tol) or np.any(lefts + lengths > p_right + tol):
        raise AssertionError(f"depth {k}: an interval leaves its parent")
    gaps = lefts[1:] - (lefts[:-1] + lengths[:-1])
    if np.any(gaps < -tol) or (strict and np.any(gaps <= 0.0)):
        raise AssertionError(f"depth {k}: sibling intervals overlap")


def _word_log_weights(spec: SystemSpec, depth: int) -> np.ndarray:
    log_w = np.zeros(1)
    for k in range(1, depth + 1):
        log_r = _flat(materialize_level(spec, k), k)
        log_w = (log_w[:, None] + log_r[None, :]).ravel()
    return log_w


def _count_words(spec: SystemSpec, depth: int) -> int:
    n = 1
    for k in range(1, depth + 1):
        level = materialize_level(spec, k)
        if not level.is_finite:
            raise InfeasiblePlacementError(
                f"level {k} is an infinite family; realise a truncated subsystem instead")
        n *= level.cardinality
        if n > MAX_INTERVALS:
            raise RealizationBudgetError(
                f"depth {depth} needs more than {MAX_INTERVALS} intervals (exceeded at level {k})")
    return n


def realize_attractor(spec: SystemSpec, depth: int, placement=None,
                      gap_fraction: Optional[float] = None) -> AttractorRealization:
    """Lay out the depth-``depth`` cylinders of ``spec`` inside ``[0, |J|]``.

    ``placement`` defaults to the system's separation (SSC gives gaps,
    OSC left-packs); ``gap_fraction`` defaults to the system's.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if placement is None:
        placement = (Placement.SSC_UNIFORM_GAPS if spec.separation is Separation.SSC
                     else Placement.OSC_LEFT_PACKED)
    placement = Placement(placement)
    gap = spec.gap_fraction if gap_fraction is None else gap_fraction
    if placement is Placement.OSC_LEFT_PACKED:
        gap = None
    _count_words(spec, depth)
    log_J = spec.log_diameter
    lefts = np.zeros(1)
    log_w = np.zeros(1)
    for k in range(1, depth + 1):
        log_r = _flat(materialize_level(spec, k), k)
        off = _offsets(log_r, placement, gap, k)
        parent_len = np.exp(log_J + log_w)
        new_lefts = (lefts[:, None] + parent_len[:, None] * off[None, :]).ravel()
        new_log_w = (log_w[:, None] + log_r[None, :]).ravel()
        _check_layout(new_lefts, np.exp(log_J + new_log_w), lefts, parent_len, len(log_r),
                      placement is Placement.SSC_UNIFORM_GAPS, k)
        lefts, log_w = new_lefts, new_log_w
    return AttractorRealization(depth=depth, lefts=lefts, lengths=np.exp(log_J + log_w),
                                log_weights=log_w, placement=placement,
                                gap_fraction=gap, spec=spec)


def _grid_index(x: np.ndarray, s: float, rounding) -> np.ndarray:
    q = x / s
    near = np.rint(q)
    snapped = np.where(np.abs(q - near) <= _GRID_SNAP * np.maximum(1.0, np.abs(q)), near, q)
    return rounding(snapped).astype(np.int64)


def _count_at(lefts: np.ndarray, rights: np.ndarray, s: float) -> int:
    # box [i s, (i+1) s) meets the interval in more than a point iff i s < b and (i+1) s > a
    lo = _grid_index(lefts, s, np.floor)
    hi = _grid_index(rights, s, np.ceil) - 1
    hi = np.maximum(hi, lo)
    covered = np.r_[lo[0] - 1, np.maximum.accumulate(hi)[:-1]]
    return int(np.sum(np.maximum(0, hi - np.maximum(lo, covered + 1) + 1)))


def box_count(realization: AttractorRealization, scales: Sequence[float]) -> list:
    """Exact number of grid boxes of each size meeting the union of intervals."""
    lefts = realization.lefts
    rights = lefts + realization.lengths
    shortest = float(realization.lengths.min())
    out = []
    for s in scales:
        s = float(s)
        if not s > 0:
            raise ValueError("box sizes must be positive")
        if s < shortest * (1 - 1e-12):
            warnings.warn(f"box size {s:.6g} is below the shortest interval {shortest:.6g}",
                          SaturatedScaleWarning, stacklevel=2)
        out.append((s, _count_at(lefts, rights, s)))
    return out


@dataclass(frozen=True)
class BoxDimEstimate:
    slope: float
    stderr: float
    scales: tuple
    counts: tuple


def empirical_box_dim(realization: AttractorRealization, scale_range=None,
                      n_scales: int = 25) -> BoxDimEstimate:
    """Least-squares slope of log N(s) against log(1/s) on geometric scales.

    ``scale_range`` is ``(s_min, s_max)``; by default from the shortest
    interval length up to ``|J| / 10``.  Scales below the shortest interval
    are discarded; at least 5 scales spanning 2 decades must remain.
    """
    shortest = float(realization.lengths.min())
    top = realization.spec.ambient_diameter
    s_min, s_max = scale_range if scale_range is not None else (shortest, top / 10)
    s_min = max(float(s_min), shortest)
    if not s_max > s_min or math.log10(s_max / s_min) < 2.0 - 1e-9:
        raise InsufficientScalesError(
            f"usable scales [{s_min:.3g}, {s_max:.3g}] span less than two decades")
    if n_scales < 5:
        raise InsufficientScalesError("need at least 5 scales")
    scales = np.geomspace(s_min, s_max, n_scales)
    counts = np.array([c for _, c in box_count(realization, scales)])
    fit = stats.linregress(np.log(1 / scales), np.log(counts))
    return BoxDimEstimate(float(fit.slope), float(fit.stderr), tuple(scales.tolist()),
                          tuple(int(c) for c in counts))


def mass_distribution(spec: SystemSpec, n: int, t: float) -> MeasureRealization:
    """Cylinder weights ``w_u**t / S_n(t)`` at depth ``n``."""
    if not 0.0 <= t <= spec.dimension:
        raise ValueError(f"t must lie in [0, {spec.dimension}]")
    _count_words(spec, n)
    log_w = t * _word_log_weights(spec, n)
    weights = np.exp(log_w - log_w.max())
    weights /= weights.sum()
    return MeasureRealization(depth=n, t=float(t), weights=weights)


def _cdf(measure: MeasureRealization, realization: AttractorRealization):
    if measure.depth != realization.depth or len(measure.weights) != len(realization):
        raise ValueError("measure and realisation have different depths")
    a = realization.lefts
    b = a + realization.lengths
    cum = np.r_[0.0, np.cumsum(measure.weights)]
    xp = np.column_stack([a, b]).ravel()
    fp = np.column_stack([cum[:-1], cum[1:]]).ravel()
    return xp, fp


def ball_masses(measure: MeasureRealization, realization: AttractorRealization,
                centers, r: float) -> np.ndarray:
    """mu(B(x, r)) for each center, exact for the interval-uniform measure."""
    xp, fp = _cdf(measure, realization)
    centers = np.asarray(centers, dtype=float)
    return np.interp(centers + r, xp, fp) - np.interp(centers - r, xp, fp)


def scan_centers(realization: AttractorRealization, samples: int) -> np.ndarray:
    """Midpoints of ``samples`` intervals evenly spread over the interval index."""
    n = len(realization)
    idx = np.unique(((np.arange(samples) + 0.5) * n / samples).astype(np.int64))
    return realization.lefts[idx] + 0.5 * realization.lengths[idx]


def local_exponent_scan(measure: MeasureRealization, realization: AttractorRealization,
                        radii: Sequence[float], samples: int = 512) -> list:
    """Per radius, the minimum over scan centers of log mu(B(x, r)) / log r."""
    centers = scan_centers(realization, samples)
    shortest = float(realization.lengths.min())
    out = []
    for r in radii:
        r = float(r)
        if not shortest < r < 1.0:
            raise ValueError(f"radius {r:.6g} outside (shortest interval, 1)")
        mu = ball_masses(measure, realization, centers, r)
        out.append((r, float(np.min(np.log(mu) / math.log(r)))))
    return out


def write_intervals_csv(realization: AttractorRealization, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["left", "length"])
        for a, l in zip(realization.lefts, realization.lengths):
            w.writerow([format(a, ".17g"), format(l, ".17g")])


def write_counts_csv(counts, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scale", "count"])
        for s, c in counts:
            w.writerow([format(s, ".17g"), c])
