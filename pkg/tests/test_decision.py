import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ndevoi.bayes import A0, AR, BinaryPrior, FailureModel
from ndevoi.decision import (
    BinaryPolicy,
    IntervalPolicy,
    OneStepProblem,
    action_costs,
    calibrate_threshold,
    cost_surface,
    optimal_action_continuous,
    optimal_expected_cost,
    optimal_policy,
    preposterior_cost,
    prior_action_costs,
    prior_optimal,
    ratio_rule,
    repair_margin,
    solve_one_step,
)
from ndevoi.distributions import Normal
from ndevoi.nde_models import ConfusionMatrix, SignalOrientation, roc_given
from ndevoi.quadrature import Interval

TABLE = FailureModel.binary({A0: (0.0, 1.0), AR: (0.0, 0.0)})


def roc_problem(p1, mu0, mu1, sd0, sd1, c_R, c_F, table=TABLE, orientation=SignalOrientation.BELOW):
    roc = roc_given(Normal(mu0, sd0), Normal(mu1, sd1), p1, orientation)
    return OneStepProblem(BinaryPrior(p1), roc, table, c_R, c_F, root_bracket=Interval(-40.0, 40.0))


problems = st.builds(
    roc_problem,
    p1=st.floats(0.01, 0.6),
    mu0=st.floats(-1.0, 1.0),
    mu1=st.floats(-1.0, 1.0),
    sd0=st.floats(0.3, 1.5),
    sd1=st.floats(0.3, 1.5),
    c_R=st.floats(0.5, 10.0),
    c_F=st.floats(1.0, 100.0),
)


@given(problems)
def test_voi_is_non_negative(p):
    _, c0 = prior_optimal(p)
    ce, _ = optimal_expected_cost(p)
    assert ce <= c0 + 1e-9 * c0


@given(problems, st.lists(st.floats(-5.0, 5.0), min_size=20, max_size=200))
def test_ratio_rule_matches_direct_comparison(p, signals):
    rule = ratio_rule(p)
    s = np.array(signals)
    ratio = np.exp(p.nde.log_likelihood_ratio(s))
    direct = repair_margin(p, s) > 0
    # points within rounding of the boundary are ambiguous
    margin = np.abs(repair_margin(p, s))
    ok = margin > 1e-9
    assert np.array_equal(rule.repair(ratio)[ok], direct[ok])


@given(problems)
def test_interval_policy_agrees_pointwise(p):
    pol = optimal_policy(p)
    s = np.linspace(-4, 4, 161)
    m = repair_margin(p, s)
    ok = np.abs(m) > 1e-6
    assert np.array_equal(pol.repair(s)[ok], (m > 0)[ok])


@given(problems)
def test_cdf_and_quadrature_costs_agree(p):
    pol = optimal_policy(p)
    a = preposterior_cost(p, pol)
    b = preposterior_cost(p, pol, method="quadrature")
    assert a == pytest.approx(b, rel=1e-7, abs=1e-10)


@given(st.floats(0.01, 0.99), st.floats(0.0, 1.0), st.floats(0.1, 10.0), st.floats(0.1, 100.0))
def test_uninformative_confusion_matrix_has_zero_voi(p1, q, c_R, c_F):
    p = OneStepProblem(BinaryPrior(p1), ConfusionMatrix(pod=q, pfa=q), TABLE, c_R, c_F)
    a_prior, c0 = prior_optimal(p)
    pol = optimal_policy(p)
    assert pol.action(0) is a_prior and pol.action(1) is a_prior
    assert preposterior_cost(p, pol) == pytest.approx(c0, rel=1e-12)


@given(problems)
def test_cost_surface_diagonal_is_prior_cost(p):
    _, c0 = prior_optimal(p)
    g = np.linspace(0, 1, 21)
    surf = cost_surface(p, g, g)
    assert np.allclose(np.diag(surf.cost), c0, rtol=1e-12)
    assert np.all(np.diag(surf.zone) == "voi0")
    assert np.all(surf.cost <= c0 + 1e-12)


@given(st.floats(0.01, 0.99), st.floats(0.1, 10.0), st.floats(0.1, 100.0))
def test_perfect_inspection_cost(p1, c_R, c_F):
    p = roc_problem(p1, 0.0, -40.0, 0.1, 0.1, c_R, c_F)
    ce, _ = optimal_expected_cost(p)
    assert ce == pytest.approx(p1 * min(c_R, c_F), rel=1e-9)


def test_ties_go_to_do_nothing():
    # c_R = c_F * p1 makes the prior actions equally costly
    p = OneStepProblem(BinaryPrior(0.5), ConfusionMatrix(0.5, 0.5), TABLE, 5.0, 10.0)
    costs = prior_action_costs(p)
    assert costs[0] == costs[1]
    assert prior_optimal(p)[0] is A0
    assert optimal_policy(p) == BinaryPolicy(A0, A0)


def test_zero_failure_cost_never_repairs():
    p = roc_problem(0.3, 0.0, -1.0, 0.5, 0.5, 1.0, 0.0)
    assert prior_optimal(p) == (A0, 0.0)
    ce, pol = optimal_expected_cost(p)
    assert ce == 0.0
    assert pol == IntervalPolicy(())


def test_ratio_rule_direction_flips_with_failure_table():
    # when repair is the costlier choice for a defective item, the inequality reverses
    inverted = FailureModel.binary({A0: (0.5, 0.0), AR: (0.5, 0.5)})
    p = roc_problem(0.3, 0.0, -1.0, 0.5, 0.5, 1.0, 10.0, table=inverted)
    rule = ratio_rule(p)
    assert rule.repair_when == "below"
    s = np.linspace(-3, 3, 301)
    ratio = np.exp(p.nde.log_likelihood_ratio(s))
    assert np.array_equal(rule.repair(ratio), repair_margin(p, s) > 0)


def test_action_costs_sum_to_prior_costs():
    p = roc_problem(0.05, -0.207, -0.354, 0.0804, 0.08, 5.0, 50.0)
    from ndevoi.quadrature import integrate

    tot = integrate(lambda s: action_costs(p, s), Interval(-math.inf, math.inf), breakpoints=[-0.3, -0.2])
    assert np.allclose(tot, prior_action_costs(p), rtol=1e-8)


def test_optimal_action_in_far_tail_is_finite():
    # densities underflow at s = -30, the log-space margin still decides
    p = roc_problem(0.05, -0.207, -0.354, 0.0804, 0.08, 5.0, 50.0)
    assert optimal_action_continuous(p, -20.0) is AR
    assert optimal_action_continuous(p, -35.0) is A0


@given(problems)
def test_calibrated_threshold_never_beats_continuous_policy(p):
    ce, _ = optimal_expected_cost(p)
    cal = calibrate_threshold(p, Interval(-4.0, 4.0), 81)
    assert ce <= cal.cost + 1e-9
    assert all(ce <= c + 1e-9 for _, c, _, _ in cal.curve)


def test_report_fields():
    p = roc_problem(0.05, -0.207, -0.354, 0.0804, 0.08, 5.0, 50.0)
    r = solve_one_step(p, unit="M")
    d = r.to_dict()
    assert d["voi"] == pytest.approx(r.prior_cost - r.expected_cost)
    assert "likelihood_ratio" in dict(r.optimal_thresholds)
    assert "VoI" in r.to_text()


def test_problem_validation():
    with pytest.raises(ValueError):
        roc_problem(0.1, 0, 1, 1, 1, -1.0, 1.0)
    with pytest.raises(TypeError):
        OneStepProblem(Normal(0, 1), ConfusionMatrix(0.5, 0.5), TABLE, 1.0, 1.0)
