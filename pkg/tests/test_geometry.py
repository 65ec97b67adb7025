import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moranspec.geometry import (InfeasiblePlacementError, InsufficientScalesError,
                                RealizationBudgetError, SaturatedScaleWarning, ball_masses,
                                box_count, empirical_box_dim, local_exponent_scan,
                                mass_distribution, realize_attractor, write_counts_csv,
                                write_intervals_csv)
from moranspec.presets import preset
from moranspec.pressure import moran_limits
from moranspec.system import InvalidSystemError, LevelSpec, SystemSpec

from conftest import CANTOR, periodic, random_specs


def cantor_intervals(depth):
    """Classical construction in exact arithmetic."""
    ivs = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        ivs = [c for a, b in ivs for c in ((a, a + (b - a) / 3), (b - (b - a) / 3, b))]
    return ivs


def boxes_meeting(ivs, s):
    """Set of grid boxes [i s, (i+1) s) meeting some interval in more than a point."""
    out = set()
    for a, b in ivs:
        i = math.floor(a / s)
        while i * s < b:
            if (i + 1) * s > a:
                out.add(i)
            i += 1
    return out


# realisation

def test_cantor_depth_two():
    r = realize_attractor(preset("middle-third"), 2)
    assert r.lefts == pytest.approx([0, 2 / 9, 6 / 9, 8 / 9], abs=1e-15)
    assert r.lengths == pytest.approx([1 / 9] * 4)


def test_cantor_matches_exact_construction():
    r = realize_attractor(preset("middle-third"), 7)
    exact = cantor_intervals(7)
    assert r.lefts == pytest.approx([float(a) for a, _ in exact], abs=1e-14)


def test_explicit_gap():
    r = realize_attractor(periodic([(0.4, 2)], separation="SSC"), 1, gap_fraction=0.2)
    assert np.array(r.intervals) == pytest.approx(np.array([[0.0, 0.4], [0.6, 0.4]]))


def test_e1_depth_three():
    r = realize_attractor(preset("E1"), 3)
    assert len(r) == 64
    assert r.lengths == pytest.approx([3.0 ** -9] * 64)


def test_left_packed():
    r = realize_attractor(preset("full-interval"), 3)
    assert r.lefts == pytest.approx(np.arange(8) / 8)


def test_ssc_infeasible():
    with pytest.raises(InfeasiblePlacementError, match="level 1"):
        realize_attractor(periodic([(0.5, 2)], separation="SSC"), 2)


def test_budget():
    with pytest.raises(RealizationBudgetError):
        realize_attractor(preset("middle-third"), 30)


def test_infinite_family_refused():
    with pytest.raises(InfeasiblePlacementError):
        realize_attractor(preset("geometric-infinite"), 1)


@settings(max_examples=40, deadline=None)
@given(spec=random_specs(max_period=2, max_branches=3), depth=st.integers(1, 5))
def test_layout_nested_and_disjoint(spec, depth):
    r = realize_attractor(spec, depth)
    right = r.lefts + r.lengths
    assert np.all(r.lefts[1:] > right[:-1])
    assert r.lefts[0] >= 0 and right[-1] <= 1 + 1e-12
    parent = realize_attractor(spec, depth - 1)
    reps = len(r) // len(parent)
    owner = np.repeat(np.arange(len(parent)), reps)
    assert np.all(r.lefts >= parent.lefts[owner] - 1e-15)
    assert np.all(right <= parent.lefts[owner] + parent.lengths[owner] + 1e-15)


# box counting

def test_box_count_cantor():
    (_, n), = box_count(realize_attractor(preset("middle-third"), 8), [3.0 ** -4])
    assert n == 16


def test_box_count_full_interval():
    (_, n), = box_count(realize_attractor(preset("full-interval"), 6), [0.1])
    assert n == 10


def test_box_count_e1_left_packed():
    # aligned with the depth-3 intervals when these are packed from the left
    r = realize_attractor(preset("E1"), 4, placement="OSC-left-packed")
    (_, n), = box_count(r, [3.0 ** -9])
    assert n == 64


@pytest.mark.parametrize("s", [Fraction(1, 81), Fraction(1, 100), Fraction(37, 1000),
                               Fraction(1, 5), Fraction(1, 7)])
def test_box_count_matches_exact_sets(s):
    r = realize_attractor(preset("middle-third"), 6)
    exact = boxes_meeting(cantor_intervals(6), s)
    (_, n), = box_count(r, [float(s)])
    assert n == len(exact)


def test_saturated_scale_warns():
    r = realize_attractor(preset("middle-third"), 3)
    with pytest.warns(SaturatedScaleWarning):
        box_count(r, [1e-4])


def test_box_dim_cantor():
    est = empirical_box_dim(realize_attractor(preset("middle-third"), 12))
    assert est.slope == pytest.approx(CANTOR, abs=0.05)


def test_box_dim_full_interval():
    est = empirical_box_dim(realize_attractor(preset("full-interval"), 12))
    assert est.slope == pytest.approx(1.0, abs=0.02)


def test_box_dim_block_alternating():
    spec = preset("block-alternating")
    lo, hi = moran_limits(spec, 2000, 1000)
    est = empirical_box_dim(realize_attractor(spec, 14))
    assert lo - 0.05 <= est.slope <= hi + 0.05


def test_box_dim_needs_two_decades():
    with pytest.raises(InsufficientScalesError):
        empirical_box_dim(realize_attractor(preset("middle-third"), 3))


# mass distribution

def test_mass_cantor():
    m = mass_distribution(preset("middle-third"), 2, CANTOR)
    assert m.weights == pytest.approx([0.25] * 4)


def test_mass_two_ratios():
    m = mass_distribution(periodic([(0.5, 1), (0.25, 1)]), 1, 1.0)
    assert m.weights == pytest.approx([2 / 3, 1 / 3])


def test_mass_e1():
    assert mass_distribution(preset("E1"), 2, 1.0).weights == pytest.approx([1 / 8] * 8)


def test_mass_t_range():
    with pytest.raises(ValueError):
        mass_distribution(preset("middle-third"), 2, 1.5)


def test_point_mass_refused():
    with pytest.raises(InvalidSystemError):
        SystemSpec(prefix=(LevelSpec.from_ratios([(0.5, 1)]),))


@settings(max_examples=40, deadline=None)
@given(spec=random_specs(max_period=2, max_branches=3), n=st.integers(1, 5),
       t=st.floats(0, 1))
def test_mass_normalised(spec, n, t):
    w = mass_distribution(spec, n, t).weights
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_ball_mass_whole_space():
    spec = preset("middle-third")
    m, r = mass_distribution(spec, 5, CANTOR), realize_attractor(spec, 5)
    assert ball_masses(m, r, [0.5], 1.0) == pytest.approx([1.0])


def test_local_exponents_triadic_radii():
    spec = preset("middle-third")
    m, r = mass_distribution(spec, 12, CANTOR), realize_attractor(spec, 12)
    rows = local_exponent_scan(m, r, 3.0 ** -np.arange(2, 11))
    assert min(e for _, e in rows) >= CANTOR - 0.05


def test_local_exponents_lebesgue():
    spec = preset("full-interval")
    m, r = mass_distribution(spec, 12, 1.0), realize_attractor(spec, 12)
    rows = local_exponent_scan(m, r, [1e-3, 1e-2, 0.05])
    # balls near the endpoints lose up to half their mass
    for rad, e in rows:
        assert e == pytest.approx(1.0, abs=math.log(2) / -math.log(rad) + 1e-9)


def test_radius_range():
    spec = preset("middle-third")
    m, r = mass_distribution(spec, 4, CANTOR), realize_attractor(spec, 4)
    with pytest.raises(ValueError):
        local_exponent_scan(m, r, [1e-4])


def test_csv_writers(tmp_path):
    r = realize_attractor(preset("middle-third"), 2)
    write_intervals_csv(r, tmp_path / "iv.csv")
    write_counts_csv(box_count(r, [1 / 9]), tmp_path / "bc.csv")
    assert (tmp_path / "iv.csv").read_text().splitlines()[0] == "left,length"
    assert (tmp_path / "bc.csv").read_text().splitlines()[1].endswith(",4")
