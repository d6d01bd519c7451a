import math

import numpy as np
import pytest

from smoothwalk import (
    ChainSchedule,
    attention_operator,
    attention_stationary,
    cauchy_gap_series,
    dim_check,
    necessary_condition_check,
    propagate_inhomogeneous,
    simple_rw,
    stationary_analytic,
)
from smoothwalk.errors import (
    DimensionMismatch,
    HypothesisViolated,
    PreconditionViolated,
    TooShort,
)
from smoothwalk.inhomogeneous import layer_stationary
from smoothwalk.operators import StochasticMatrix
from conftest import random_connected_nonbipartite, symmetric_random_logits


def _uniform_logits(g):
    logits = {}
    for u, v in g.edges:
        logits[(u, v)] = 0.0
        logits[(v, u)] = 0.0
    return logits


def _att_layer(g, rng, scale=1.0):
    return attention_operator(g, symmetric_random_logits(g, rng, scale=scale))


def test_schedule_rejects_empty():
    with pytest.raises(TooShort):
        ChainSchedule(layers=())


def test_schedule_rejects_mixed_dimensions(k3, c5):
    with pytest.raises(DimensionMismatch):
        ChainSchedule(layers=(simple_rw(k3), simple_rw(c5)))


def test_schedule_rejects_mixed_support(k3, k3_loops):
    with pytest.raises(DimensionMismatch):
        ChainSchedule(layers=(simple_rw(k3), simple_rw(k3_loops)))


def test_attention_stationary_uniform_logits_is_degree_law(k3, c5):
    for g in (k3, c5):
        op = attention_operator(g, _uniform_logits(g))
        np.testing.assert_allclose(
            attention_stationary(op), stationary_analytic(g), atol=1e-12
        )


def test_attention_stationary_weighted_degree_value(k3):
    """The weighted-degree formula itself, on an asymmetric assignment.

    One boosted logit on (0, 1) gives weights (e + 1, 2, 2). With asymmetric
    logits this vector is the formula's output, not a fixed point, so only the
    value is checked here.
    """
    logits = _uniform_logits(k3)
    logits[(0, 1)] = 1.0
    op = attention_operator(k3, logits)
    expected = np.array([math.e + 1, 2.0, 2.0])
    np.testing.assert_allclose(
        attention_stationary(op), expected / expected.sum(), atol=1e-12
    )


def test_attention_stationary_symmetric_logits_is_fixed_point():
    rng = np.random.default_rng(7)
    for seed in range(10):
        g = random_connected_nonbipartite(8, seed=60 + seed)
        op = _att_layer(g, rng)
        pi = attention_stationary(op)
        assert np.abs(pi @ op.entries - pi).sum() <= 1e-10


def test_attention_stationary_rejects_bipartite(p3):
    op = attention_operator(p3, _uniform_logits(p3))
    with pytest.raises(PreconditionViolated):
        attention_stationary(op)


def test_layer_stationary_falls_back_for_asymmetric_logits(k3):
    logits = _uniform_logits(k3)
    logits[(0, 1)] = 1.0
    op = attention_operator(k3, logits)
    pi = layer_stationary(op)
    assert np.abs(pi @ op.entries - pi).sum() <= 1e-10


def test_layer_stationary_handles_plain_operators(k3_loops):
    np.testing.assert_allclose(
        layer_stationary(simple_rw(k3_loops)), np.full(3, 1 / 3), atol=1e-10
    )


def test_propagate_matches_manual_products(k3):
    rng = np.random.default_rng(5)
    layers = (simple_rw(k3), _att_layer(k3, rng), _att_layer(k3, rng))
    schedule = ChainSchedule(layers=layers)
    mu0 = rng.dirichlet(np.ones(3))
    traj = propagate_inhomogeneous(mu0, schedule)
    assert len(traj) == 4
    np.testing.assert_allclose(traj[0], mu0)
    expected = mu0
    for layer, point in zip(layers, traj[1:]):
        expected = expected @ layer.entries
        np.testing.assert_allclose(point, expected, atol=1e-14)


def test_propagate_shape_mismatch(k3):
    schedule = ChainSchedule(layers=(simple_rw(k3),))
    with pytest.raises(DimensionMismatch):
        propagate_inhomogeneous(np.full(4, 0.25), schedule)


def test_cauchy_gap_series_constant_trajectory():
    mu = np.full(3, 1 / 3)
    assert cauchy_gap_series([mu, mu, mu]) == [0.0, 0.0]


def test_cauchy_gap_series_triangle_geometric(k3):
    schedule = ChainSchedule(layers=(simple_rw(k3),) * 6)
    traj = propagate_inhomogeneous(np.array([1.0, 0.0, 0.0]), schedule)
    gaps = np.array(cauchy_gap_series(traj))
    # One step from a point mass moves mass 2, then halves each layer.
    np.testing.assert_allclose(gaps, 2.0 * 0.5 ** np.arange(6), atol=1e-12)


def test_cauchy_gap_series_too_short():
    with pytest.raises(TooShort):
        cauchy_gap_series([np.full(3, 1 / 3)])


def test_dim_check_constant_schedule_converges(k3):
    rng = np.random.default_rng(2)
    layer = _att_layer(k3, rng)
    report = dim_check(ChainSchedule(layers=(layer,) * 30))
    assert report.classification == "converged"
    assert report.drift_summable
    assert report.dobrushin_vanishes
    np.testing.assert_allclose(report.drift_partial_sums, 0.0, atol=1e-12)


def test_dim_check_oscillating_schedule_does_not_converge(k3):
    high = _uniform_logits(k3)
    low = _uniform_logits(k3)
    high[(0, 1)] = high[(1, 0)] = 3.0
    low[(0, 2)] = low[(2, 0)] = 3.0
    a = attention_operator(k3, high)
    b = attention_operator(k3, low)
    report = dim_check(ChainSchedule(layers=(a, b) * 15))
    assert report.classification == "non_converged"
    assert report.gap_lower_bound > 1e-6
    assert not report.drift_summable


def test_dim_check_decaying_schedule_converges(k3):
    layers = []
    base = _uniform_logits(k3)
    base[(0, 1)] = base[(1, 0)] = 2.0
    for l in range(1, 41):
        logits = {k: v / l**2 for k, v in base.items()}
        layers.append(attention_operator(k3, logits))
    report = dim_check(ChainSchedule(layers=tuple(layers)))
    assert report.classification == "converged"
    assert report.drift_summable


def test_dim_check_products_are_nonincreasing(k3):
    rng = np.random.default_rng(9)
    layers = tuple(_att_layer(k3, rng) for _ in range(12))
    report = dim_check(ChainSchedule(layers=layers), dobrushin_window=3)
    for vals in report.dobrushin_products.values():
        assert np.all(np.diff(vals) <= 1e-12)


def test_dim_check_rejects_bipartite_support(p3):
    with pytest.raises(PreconditionViolated):
        dim_check(ChainSchedule(layers=(simple_rw(p3),) * 3))


def test_necessary_condition_constant_schedule(k3):
    op = attention_operator(k3, _uniform_logits(k3))
    schedule = ChainSchedule(layers=(op,) * 50)
    report = necessary_condition_check(schedule, np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(report.c_values, 0.5, atol=1e-12)
    assert report.trajectory_converged
    assert report.stationary_converged
    assert report.consistent
    assert not report.contrapositive_triggered


def test_necessary_condition_contrapositive_on_oscillation(k3):
    high = _uniform_logits(k3)
    low = _uniform_logits(k3)
    high[(0, 1)] = high[(1, 0)] = 3.0
    low[(0, 2)] = low[(2, 0)] = 3.0
    layers = (attention_operator(k3, high), attention_operator(k3, low)) * 10
    report = necessary_condition_check(ChainSchedule(layers=layers), np.full(3, 1 / 3))
    assert report.min_drift > 1e-6
    assert not report.trajectory_converged
    assert report.contrapositive_triggered
    assert report.consistent


def test_necessary_condition_rejects_noncontracting_layer(k3_loops):
    ident = StochasticMatrix(n=3, entries=np.eye(3), support_graph=k3_loops)
    with pytest.raises(HypothesisViolated):
        necessary_condition_check(
            ChainSchedule(layers=(ident,) * 3), np.full(3, 1 / 3)
        )
