import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moranspec.infinite import (DivergentSumError, HypothesisFailedError, MPhiStatus,
                                Provenance, TruncationPlan, build_subsystem, classify,
                                coverage_holds, head_level, infinite_condition_check,
                                m_phi_estimate, ratio_prune, truncate_level, verify_coverage)
from moranspec.presets import preset
from moranspec.pressure import jump_points, partition_sum
from moranspec.system import AnalyticFamily, LevelSpec, Rule, SystemSpec, Verdict

from conftest import CANTOR, LOG2, LOG3


def geometric(scale, decay):
    return LevelSpec(family=AnalyticFamily("geometric", math.log(scale), decay))


def power(scale, p):
    return LevelSpec(family=AnalyticFamily("power", math.log(scale), p))


# single-level cuts

def test_geometric_cut_example():
    assert truncate_level(geometric(0.5, 0.5), 1.0, 0.1) == 4


def test_infinite_slack():
    assert truncate_level(geometric(0.5, 0.5), 1.0, math.inf) == 1


@pytest.mark.parametrize("q,t,delta", [(0.5, 1.0, 0.1), (0.3, 0.7, 0.01), (0.9, 1.5, 1e-4)])
def test_geometric_cut_closed_form(q, t, delta):
    # tail/head = q**(tK) / (1 - q**(tK)); K is the least index with ratio <= delta
    K = truncate_level(geometric(1.0, q), t, delta)
    ratio = lambda n: q ** (t * n) / (1 - q ** (t * n))
    assert ratio(K) <= delta * (1 + 1e-12)
    assert K == 1 or ratio(K - 1) > delta


def test_power_cut_against_direct_sum():
    # c_j = j**-2 / 2 at t = 1; partial sums to 10**6 as the oracle
    j = np.arange(1, 10 ** 6 + 1, dtype=float)
    terms = j ** -2.0
    full = math.pi ** 2 / 6
    head = np.cumsum(terms)
    delta = 0.1
    K_ref = int(np.argmax(full - head <= delta * head)) + 1
    assert truncate_level(power(0.5, 2.0), 1.0, delta) == K_ref == 7


def test_power_cut_divergent():
    with pytest.raises(DivergentSumError):
        truncate_level(power(0.5, 2.0), 0.5, 0.1)


def test_finite_level_not_cut():
    lv = LevelSpec.from_ratios([(0.5, 1), (0.25, 3)])
    assert truncate_level(lv, 1.0, 0.1) == 4


@settings(max_examples=60, deadline=None)
@given(q=st.floats(0.05, 0.95), t=st.floats(0.2, 2.0), delta=st.floats(1e-6, 10.0))
def test_coverage_after_cut(q, t, delta):
    lv = geometric(0.5, q)
    K = truncate_level(lv, t, delta)
    assert coverage_holds(lv, K, t, delta)[2]


def test_head_level():
    lv = head_level(geometric(1.0, 0.5), 3)
    assert [math.exp(lr) for lr, _ in lv.groups] == pytest.approx([0.5, 0.25, 0.125])
    assert lv.truncated


# ratio pruning

def test_ratio_prune_example():
    lv = LevelSpec.from_ratios([(0.5, 1), (0.25, 1), (1 / 64, 1)])
    kept = ratio_prune(lv, 1.0, 2.0)
    assert [math.exp(lr) for lr, _ in kept.groups] == pytest.approx([0.5, 0.25])


def test_ratio_prune_keeps_all():
    lv = LevelSpec.from_ratios([(0.5, 1), (0.25, 1), (1 / 64, 1)])
    assert ratio_prune(lv, 1.0, math.inf) == lv
    single = LevelSpec.from_ratios([(0.3, 3)])
    assert ratio_prune(single, 0.5, 1.0) == single


@settings(max_examples=80, deadline=None)
@given(ratios=st.lists(st.floats(1e-4, 0.3), min_size=2, max_size=8),
       t0=st.floats(0.1, 2.0), alpha=st.floats(1.0, 10.0))
def test_ratio_prune_spread(ratios, t0, alpha):
    lv = LevelSpec.from_ratios([(r, 1) for r in ratios])
    kept = ratio_prune(lv, t0, alpha)
    bound = math.log(alpha) + lv.log_cardinality / t0
    assert kept.log_max_ratio == lv.log_max_ratio
    assert kept.log_max_ratio - kept.log_min_ratio <= bound * (1 + 1e-12)


# plans

def test_plan_staircase():
    plan = TruncationPlan(blocks=((1, 0.5), (10, 0.1), (20, 0.01)), t_values=(1.0,),
                          distortion_constant=1.5)
    assert [plan.slack(k) for k in (1, 9, 10, 25)] == [0.5, 0.5, 0.1, 0.01]
    assert plan.defect_bound(25) == pytest.approx(0.01 * 1.5 ** 2)


@pytest.mark.parametrize("blocks", [((2, 0.1),), ((1, 0.1), (1, 0.2)), ((1, 0.0),)])
def test_plan_validation(blocks):
    with pytest.raises(ValueError):
        TruncationPlan(blocks=blocks, t_values=(1.0,))


def test_finite_spec_identity_plan():
    spec = preset("middle-third")
    sub, plan = build_subsystem(spec, [0.5, 1.0], [0.1])
    assert sub is spec
    assert plan.provenance is Provenance.IDENTITY


def test_geometric_infinite_subsystem():
    spec = preset("geometric-infinite")
    sub, plan = build_subsystem(spec, np.linspace(0.1, 1.0, 10), [0.5, 0.1, 0.01])
    rows = verify_coverage(spec, plan, 192)
    assert len(rows) == 192 * 10
    assert all(holds for *_, holds in rows)
    # untruncated level sums 2**(-n t) 2**-t / (1 - 2**-t): pressure -> -inf for t > 0
    r = jump_points(sub, 400, 100)
    assert r.s_lower == pytest.approx(0.0, abs=1e-2)


def test_stationary_truncation_root():
    spec = preset("geometric-stationary")
    sub, _ = build_subsystem(spec, np.linspace(0.5, 1.0, 6), [0.01, 1e-4, 1e-6])
    r = jump_points(sub, 400, 100, tol=1e-6)
    assert r.s_lower == pytest.approx(CANTOR, abs=1e-2)
    assert r.s_lower <= CANTOR + 1e-6  # a subsystem cannot exceed the full system


def test_pressure_defect_within_bound():
    spec = preset("geometric-stationary")
    slack = 0.05
    ts = (0.5, 0.75, 1.0)
    sub, plan = build_subsystem(spec, ts, [slack])
    for t in ts:
        full_level = math.log(3.0 ** -t / (1 - 3.0 ** -t))
        for k in (1, 10, 100):
            defect = k * full_level - partition_sum(sub, k, t)
            assert 0 <= defect / k <= plan.defect_bound(k)


def test_hypothesis_failure_refused():
    # power family at the divergence exponent mixed with convergent levels
    spec = SystemSpec(prefix=(power(0.5, 2.0),), tail=Rule("geometric_family"))
    with pytest.raises(HypothesisFailedError, match="t=0.5"):
        build_subsystem(spec, [0.5, 1.0], [0.1], n_check=128)


# hypothesis checks

def test_condition_check_geometric():
    rep = infinite_condition_check(preset("geometric-infinite"), [0.25, 0.5, 1.0],
                                   [0.5, 1.0], 256)
    assert rep.finite == ("finite",) * 3
    assert rep.verdict() is Verdict.HOLDS


def test_condition_check_divergent_branch():
    # c_{n,k} = k**-2 / 2 at t = 1/2: harmonic heads over k <= 2**n grow like n
    spec = SystemSpec(tail=Rule("power_family", {"scale": 0.5, "exponent": 2.0}))
    rep = infinite_condition_check(spec, [0.5], [1.0], 400)
    assert rep.finite == ("divergent",)
    (entry,) = rep.entries
    assert entry.branch == "divergent"
    assert entry.verdict is Verdict.HOLDS


def test_condition_check_shrinking_heads_fail():
    # with level scale 1/2 the divergent heads shrink like 2**(-n/2) log K
    spec = SystemSpec(tail=Rule("power_family", {"scale": 0.5, "level_scale": 0.5,
                                                 "exponent": 2.0}))
    rep = infinite_condition_check(spec, [0.5], [1.0], 400)
    assert rep.verdict() is Verdict.FAILS


def test_condition_check_finite_spec():
    rep = infinite_condition_check(preset("E1"), [0.5], [1.0], 64)
    assert rep.vacuous and rep.verdict() is Verdict.HOLDS


# m_Phi

def test_m_phi_cantor():
    est = m_phi_estimate(preset("middle-third"), np.linspace(0.05, 1.0, 20), 200, 50)
    assert est.status is MPhiStatus.LIMIT
    assert est.value == 0.0


def test_m_phi_three_branch():
    est = m_phi_estimate(preset("three-branch"), np.linspace(0.05, 1.0, 20), 200, 50)
    assert est.status is MPhiStatus.LIMIT


def test_m_phi_infinite_pressure():
    # #I_k = 2**k: (1/k) log S_k(0) grows like k log 2 / 2, and P_(t) = -inf for t > 0
    est = m_phi_estimate(preset("E2"), [0.25, 0.5], 200, 50)
    assert est.status is MPhiStatus.ATTAINED
    assert est.value == math.inf
    assert est.values[1:] == (-math.inf, -math.inf)


def test_m_phi_e1():
    # P_(t) = +inf below log2/log3 and -inf above
    est = m_phi_estimate(preset("E1"), np.linspace(0.05, 1.0, 20), 200, 50)
    assert est.status is MPhiStatus.ATTAINED and est.value == math.inf
    assert est.growth_verdict is Verdict.HOLDS


def test_m_phi_e3():
    # two maps per level: P_(0) = log 2, and P_(t) = -inf for t > 0
    est = m_phi_estimate(preset("E3"), [0.25, 0.5], 200, 50)
    assert est.status is MPhiStatus.ATTAINED
    assert est.value == pytest.approx(LOG2)
    assert est.growth_ratio < 0.05


def test_classify_patterns():
    t = [0.0, 0.5, 1.0]
    assert classify(t, [1.0, -math.inf, -math.inf], 1.0) == (1.0, MPhiStatus.ATTAINED)
    assert classify(t, [0.2, 0.1, -0.3], 1.0) == (0.0, MPhiStatus.LIMIT)
    assert classify(t, [-0.1, -0.2, -0.3], 1.0) == (None, MPhiStatus.UNDEFINED)
    # a jump larger than the continuity budget
    assert classify(t, [0.5, 0.4, -3.0], 1.0)[1] is MPhiStatus.INCONCLUSIVE
    # a rising step is noise
    assert classify(t, [0.5, 0.6, -0.1], 1.0)[1] is MPhiStatus.INCONCLUSIVE
