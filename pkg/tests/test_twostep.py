import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndevoi.bayes import A0, AR, BinaryPrior, FailureModel
from ndevoi.decision import OneStepProblem, optimal_expected_cost
from ndevoi.distributions import Normal
from ndevoi.nde_models import ConfusionMatrix, SignalOrientation, roc_given
from ndevoi.quadrature import Interval
from ndevoi.twostep import (
    MEMORYLESS,
    PolicyTree,
    TwoStepProblem,
    fixed_point_costs,
    fixed_point_solution,
    history_dependence_after_repair,
    history_table,
    memoryless_policy_cost,
    policy_tree_cost,
    prior_solution,
    tabulate_v2,
    two_step_solve,
    v2_exact,
    zone_map,
    zone_of,
)

TABLE = FailureModel.binary({A0: (0.0, 1.0), AR: (0.0, 0.0)})
ALL_TREES = [
    PolicyTree((a, b), ((c, d), (e, f)))
    for a, b, c, d, e, f in itertools.product((A0, AR), repeat=6)
]

probs = st.floats(0.0, 1.0)


@st.composite
def two_step_problems(draw):
    t0 = draw(st.floats(0.0, 0.5))
    return TwoStepProblem(
        prior_y1=draw(st.floats(0.0, 0.6)),
        transition=((1.0 - t0, t0), (0.0, 1.0)),
        c_R=(draw(st.floats(0.1, 10.0)), draw(st.floats(0.1, 10.0))),
        c_F=(draw(st.floats(1.0, 100.0)), draw(st.floats(1.0, 100.0))),
    )


@given(two_step_problems(), probs, probs)
def test_backward_induction_beats_every_policy_tree(p, pfa, pod):
    cost, tree = fixed_point_solution(p, pfa, pod)
    assert cost == pytest.approx(policy_tree_cost(p, pfa, pod, tree), rel=1e-12, abs=1e-12)
    best = min(policy_tree_cost(p, pfa, pod, t) for t in ALL_TREES)
    assert cost == pytest.approx(best, rel=1e-12, abs=1e-12)


@given(two_step_problems(), probs, probs)
def test_fixed_point_never_worse_than_prior(p, pfa, pod):
    _, c0 = prior_solution(p)
    assert float(fixed_point_costs(p, pfa, pod)) <= c0 + 1e-12


@given(two_step_problems(), probs)
def test_uninformative_point_has_zero_voi(p, q):
    _, c0 = prior_solution(p)
    assert float(fixed_point_costs(p, q, q)) == pytest.approx(c0, rel=1e-12, abs=1e-12)


@given(two_step_problems())
def test_prior_solution_is_best_open_loop_tree(p):
    actions, c0 = prior_solution(p)
    # with an uninformative NDE a tree that ignores outcomes is an open-loop policy
    open_loop = [t for t in ALL_TREES if t.a1[0] == t.a1[1] and len({t.a2[0][0], t.a2[0][1], t.a2[1][0], t.a2[1][1]}) == 1]
    best = min(policy_tree_cost(p, 0.5, 0.5, t) for t in open_loop)
    assert c0 == pytest.approx(best, rel=1e-12)


@given(two_step_problems(), probs, probs)
def test_zone_one_cost_equals_memoryless(p, pfa, pod):
    cost, tree = fixed_point_solution(p, pfa, pod)
    if zone_of(tree) == 1:
        assert memoryless_policy_cost(p, pfa, pod) == pytest.approx(cost, rel=1e-12)
    assert memoryless_policy_cost(p, pfa, pod) >= cost - 1e-12


@given(st.floats(0.0, 0.9), probs, probs, st.floats(0.1, 10.0), st.floats(1.0, 100.0))
def test_zero_second_step_costs_reduce_to_one_step(p1, pfa, pod, c_R, c_F):
    ts = TwoStepProblem(p1, ((0.9, 0.1), (0.0, 1.0)), c_R=(c_R, 0.0), c_F=(c_F, 0.0))
    one = OneStepProblem(BinaryPrior(p1), ConfusionMatrix(pod=pod, pfa=pfa), TABLE, c_R, c_F)
    ce, _ = optimal_expected_cost(one)
    assert float(fixed_point_costs(ts, pfa, pod)) == pytest.approx(ce, rel=1e-12, abs=1e-12)


@pytest.fixture(scope="module")
def halfcell_like():
    roc = roc_given(Normal(-0.207, 0.0804), Normal(-0.354, 0.08), 0.1, SignalOrientation.BELOW)
    return TwoStepProblem(0.1, ((0.95, 0.05), (0.0, 1.0)), 5.0, 50.0, nde=roc, root_bracket=Interval(-40.0, 1.0))


def test_continuous_reduces_to_one_step_when_second_step_is_free(halfcell_like):
    import dataclasses

    p = dataclasses.replace(halfcell_like, c_R=(5.0, 0.0), c_F=(50.0, 0.0))
    res = two_step_solve(p, "continuous")
    one = OneStepProblem(BinaryPrior(0.1), p.nde, TABLE, 5.0, 50.0, root_bracket=p.root_bracket)
    ce, _ = optimal_expected_cost(one)
    assert res.expected_cost == pytest.approx(ce, rel=1e-7)


def test_value_table_matches_exact_at_nodes(halfcell_like):
    grid = np.array([0.0, 1e-4, 0.01, 0.05, 0.2, 0.5, 1.0])
    table = tabulate_v2(halfcell_like, grid)
    for b, v in zip(grid, table.values):
        assert v == pytest.approx(v2_exact(halfcell_like, float(b)), rel=1e-14)
    assert table(1.0) == pytest.approx(5.0, rel=1e-9)  # certain defect: repair
    assert table(0.0) == 0.0


def test_v2_is_concave(halfcell_like):
    grid = np.linspace(0.0, 1.0, 41)
    v = tabulate_v2(halfcell_like, grid).values
    assert np.all(np.diff(v, 2) <= 1e-9)


@pytest.fixture(scope="module")
def continuous_solution(halfcell_like):
    return two_step_solve(halfcell_like, "continuous")


def test_continuous_dominates_fixed_points(halfcell_like, continuous_solution):
    op = two_step_solve(halfcell_like, "optimize_point", bracket=Interval(-0.6, 0.0), grid_points=201)
    assert continuous_solution.expected_cost <= op.expected_cost
    assert continuous_solution.expected_cost <= continuous_solution.prior_cost


def test_second_step_independent_of_history_after_repair(halfcell_like, continuous_solution):
    rows = history_table(halfcell_like, continuous_solution.value_table, np.linspace(-0.6, 0.0, 25))
    assert any(r[1] is AR for r in rows) and any(r[1] is A0 for r in rows)
    assert history_dependence_after_repair(rows) == 0.0


def test_zone_classification():
    assert zone_of(MEMORYLESS) == 1
    assert zone_of(PolicyTree((AR, AR), ((A0, AR), (A0, AR)))) == 3
    assert zone_of(PolicyTree((AR, AR), ((A0, A0), (A0, A0)))) == 5
    assert zone_of(PolicyTree((AR, A0), ((A0, A0), (A0, A0)))) == 0


def test_zone_map_shape_and_labels(halfcell_like):
    g = np.linspace(0.0, 1.0, 11)
    zones = zone_map(halfcell_like, g, g)
    assert zones.shape == (11, 11)
    assert set(np.unique(zones)) <= {0, 1, 2, 3, 4, 5}
    # a perfect inspection is used memorylessly
    assert zones[-1, 0] == 1


def test_problem_validation():
    with pytest.raises(ValueError):
        TwoStepProblem(0.1, ((0.5, 0.6), (0.0, 1.0)), 1.0, 1.0)
    with pytest.raises(ValueError):
        two_step_solve(TwoStepProblem(0.1, ((1.0, 0.0), (0.0, 1.0)), 1.0, 1.0, nde=ConfusionMatrix(0.5, 0.5)), "nope")
