import math

import numpy as np
import pytest
from hypothesis import strategies as st

from moranspec.system import LevelSpec, Periodic, SystemSpec

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)
CANTOR = LOG2 / LOG3


def periodic(*levels, separation="OSC", **kw):
    """System repeating the given levels; each level is a list of (ratio, count)."""
    return SystemSpec(tail=Periodic(tuple(LevelSpec.from_ratios(lv) for lv in levels)),
                      separation=separation, **kw)


@st.composite
def random_specs(draw, max_period=3, max_branches=4):
    """Periodic systems with 2..max_branches maps per level and ratio sum < 1."""
    levels = []
    for _ in range(draw(st.integers(1, max_period))):
        n = draw(st.integers(2, max_branches))
        ratios = draw(st.lists(st.floats(0.02, 0.9 / n), min_size=n, max_size=n))
        levels.append([(r, 1) for r in ratios])
    return periodic(*levels, separation="SSC")


@pytest.fixture
def binary_half():
    return periodic([(0.5, 2)])


CUT_RATIOS = (1 / 2, 1 / 3, 1 / 4, 2 / 5)


def random_cut_instance(rng):
    """Small periodic system plus a (delta, theta, t) triple for the brute-force oracle."""
    from moranspec.cutset import CutSetProblem

    levels = []
    for _ in range(rng.integers(1, 4)):
        n = int(rng.integers(2, 4))
        levels.append([(float(rng.choice(CUT_RATIOS)), 1) for _ in range(n)])
    spec = periodic(*levels)
    theta = float(rng.choice([0.3, 0.5, 1.0]))
    t = float(rng.uniform(0.0, 1.5))
    delta = float(np.exp(rng.uniform(np.log(0.1), np.log(0.6))))
    return spec, CutSetProblem.at(delta, theta, t)


def compare_with_brute_force(n_instances, seed=0, max_cut_sets=20_000):
    """Largest log-space error between the DP and enumeration over n compared instances."""
    from moranspec.cutset import InstanceTooLargeError, brute_force_min_cut, min_cut_cost

    rng = np.random.default_rng(seed)
    worst, compared, skipped = 0.0, 0, 0
    while compared < n_instances:
        spec, prob = random_cut_instance(rng)
        try:
            ref = brute_force_min_cut(spec, prob, max_cut_sets=max_cut_sets)
        except InstanceTooLargeError:
            skipped += 1
            continue
        got = min_cut_cost(spec, prob, method="dp")
        worst = max(worst, abs(got.min_cost_log - ref.min_cost_log))
        compared += 1
    return worst, compared, skipped
