import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credence import (
    Splitting,
    Verdict,
    benefit_test,
    envelope_profit,
    p_equilibrium_value,
    qcav,
    securable,
    validate_model,
)
from credence.envelope import SecurabilityWitness, merge_by_index, refine_to_level
from credence.model import EPS_EQ
from credence.profits import hyperplane_profits, monopoly_prices

from _support import B1, T1, UNIFORM3, beliefs, model_and_prior, models

TOL = 1e-6


def test_securable_at_prior_level_is_singleton():
    ok, w = securable(T1, UNIFORM3, 0.2)
    assert ok and w.splitting.k == 1


def test_securable_above_global_bound_is_infeasible():
    ok, w = securable(T1, UNIFORM3, 1.21)
    assert not ok and w is None


def test_securable_binary_witness():
    ok, w = securable(B1, [0.5, 0.5], 0.8 - 1e-9)
    assert ok
    assert np.all(envelope_profit(B1, w.splitting.posteriors) >= 0.8 - 1e-8)
    np.testing.assert_allclose(w.splitting.mean(), [0.5, 0.5], atol=1e-10)
    assert len(set(w.branches)) == len(w.branches)


def test_qcav_binary_below_threshold():
    env = qcav(B1, [0.5, 0.5])
    assert env.value == pytest.approx(0.8, abs=TOL)
    assert env.indices == (1, 2)
    np.testing.assert_allclose(env.splitting.weights, [1 / 6, 5 / 6], atol=TOL)
    np.testing.assert_allclose(env.splitting.posteriors, [[1, 0], [0.4, 0.6]], atol=TOL)


def test_qcav_binary_above_threshold_is_singleton():
    env = qcav(B1, [0.2, 0.8])
    assert env.value == pytest.approx(1.0, abs=1e-12)
    assert env.splitting.k == 1


@settings(max_examples=40, deadline=None)
@given(models(), st.data())
def test_qcav_at_vertex_is_surplus(model, data):
    j = data.draw(st.integers(0, model.n - 1))
    assert qcav(model, np.eye(model.n)[j]).value == pytest.approx(model.surpluses[j], abs=1e-9)


def test_refine_pulls_overshooting_posterior():
    # weights of {(1,0), (0.2,0.8)} averaging to (0.5,0.5): 0.5 = 0.8 w  ->  w = 5/8
    split = Splitting.build([3 / 8, 5 / 8], [[1.0, 0.0], [0.2, 0.8]])
    out = refine_to_level(B1, [0.5, 0.5], SecurabilityWitness(0.8, split, (1, 2)), 0.8)
    np.testing.assert_allclose(out.splitting.posteriors, [[1, 0], [0.4, 0.6]], atol=1e-12)
    np.testing.assert_allclose(out.splitting.mean(), [0.5, 0.5], atol=1e-12)


def test_refine_from_vertices_rebalances_weights():
    split = Splitting.build([0.5, 0.5], [[1.0, 0.0], [0.0, 1.0]])
    out = refine_to_level(B1, [0.5, 0.5], SecurabilityWitness(0.8, split, (1, 2)), 0.8)
    np.testing.assert_allclose(out.splitting.posteriors, [[1, 0], [0.4, 0.6]], atol=1e-12)
    np.testing.assert_allclose(out.splitting.weights, [1 / 6, 5 / 6], atol=1e-12)


def test_refine_leaves_level_witness_alone():
    split = Splitting.build([1 / 6, 5 / 6], [[1.0, 0.0], [0.4, 0.6]])
    w = SecurabilityWitness(0.8, split, (1, 2))
    assert refine_to_level(B1, [0.5, 0.5], w, 0.8) is w


def test_merge_combines_shared_index():
    split = Splitting.build([1 / 6, 5 / 12, 5 / 12], [[1.0, 0.0], [0.45, 0.55], [0.35, 0.65]])
    merged = merge_by_index(B1, SecurabilityWitness(0.8, split, (1, 2, 2)))
    assert merged.indices == (1, 2)
    np.testing.assert_allclose(merged.splitting.posteriors[1], [0.4, 0.6], atol=1e-12)
    np.testing.assert_allclose(merged.splitting.weights, [1 / 6, 5 / 6], atol=1e-12)


def test_merge_keeps_distinct_indices():
    split = Splitting.build([1 / 6, 5 / 6], [[1.0, 0.0], [0.4, 0.6]])
    merged = merge_by_index(B1, SecurabilityWitness(0.8, split, (1, 2)))
    assert merged.indices == (1, 2)
    np.testing.assert_allclose(merged.splitting.posteriors, split.posteriors)


@pytest.mark.parametrize("p, expected", [([1.0, 1.6], 0.8), ([0.5, 1.6], 0.3), ([3.0, 3.0], 0.0)])
def test_p_equilibrium_value_binary(p, expected):
    assert p_equilibrium_value(B1, [0.5, 0.5], p) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize(
    "model, prior, verdict",
    [(B1, [0.5, 0.5], Verdict.TRUE), (B1, [0.2, 0.8], Verdict.FALSE), (T1, UNIFORM3, Verdict.TRUE)],
)
def test_benefit_verdicts(model, prior, verdict):
    res = benefit_test(model, prior)
    assert res.verdict is verdict
    if verdict is Verdict.TRUE:
        assert res.witness.value > res.profit + EPS_EQ


def test_benefit_boundary_band():
    # at q = 0.6 the no-talk profit equals the second surplus, 0.8
    res = benefit_test(B1, [0.4, 0.6])
    assert res.verdict is Verdict.BOUNDARY


def test_benefit_on_boundary_prior_reduces_support():
    res = benefit_test(T1, [0.5, 0.0, 0.5])
    reduced = validate_model([1.0, 3.0], [0.2, 2.2])
    direct = benefit_test(reduced, [0.5, 0.5])
    assert res.verdict is direct.verdict
    if res.witness is not None:
        assert np.all(res.witness.splitting.posteriors[:, 1] == 0.0)
        assert set(res.witness.indices) <= {1, 3}


# -- properties ------------------------------------------------------------------


def _check_level_shape(model, env):
    split = env.splitting
    assert split.k <= model.n
    assert len(set(env.indices)) == len(env.indices)
    for mu, i in zip(split.posteriors, env.indices):
        assert abs(envelope_profit(model, mu) - env.value) <= 1e-6
        if i > 0:
            assert abs(hyperplane_profits(model, mu)[i - 1] - env.value) <= 1e-6


@settings(max_examples=80, deadline=None)
@given(model_and_prior())
def test_qcav_dominates_and_has_level_shape(case):
    model, prior = case
    env = qcav(model, prior)
    assert env.value >= envelope_profit(model, prior) - EPS_EQ
    assert env.value <= model.surpluses.max() + EPS_EQ
    np.testing.assert_allclose(env.splitting.mean(), prior, atol=1e-10)
    _check_level_shape(model, env)


@settings(max_examples=80, deadline=None)
@given(models(), st.data(), st.floats(0.01, 0.99))
def test_qcav_quasiconcave(model, data, lam):
    a, b = data.draw(beliefs(model.n)), data.draw(beliefs(model.n))
    mid = qcav(model, lam * a + (1 - lam) * b).value
    assert mid >= min(qcav(model, a).value, qcav(model, b).value) - EPS_EQ


@settings(max_examples=60, deadline=None)
@given(model_and_prior(), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_securable_monotone_in_level(case, x, y):
    model, prior = case
    top = model.surpluses.max()
    lo, hi = sorted((x * top, y * top))
    if securable(model, prior, hi)[0]:
        assert securable(model, prior, lo)[0]


@settings(max_examples=60, deadline=None)
@given(model_and_prior(interior=True), st.data())
def test_operator_exchange_bound(case, data):
    model, prior = case
    p = np.array(data.draw(st.lists(st.floats(0.0, 6.0), min_size=model.n, max_size=model.n)))
    assert p_equilibrium_value(model, prior, p) <= qcav(model, prior).value + EPS_EQ


@settings(max_examples=60, deadline=None)
@given(model_and_prior())
def test_monopoly_price_value_reaches_envelope(case):
    # posting the monopoly list at the prior gets at least pi_bar(prior)
    model, prior = case
    p = monopoly_prices(model, prior).prices
    assert p_equilibrium_value(model, prior, p) >= envelope_profit(model, prior) - 1e-7


def test_gain_above_second_surplus_with_non_monotone_losses():
    # treatment 3 also cures type 2, whose loss exceeds l_3, so its monopoly
    # price can exceed l_3 and the no-talk profit can be beaten above s_(2)
    from fractions import Fraction as F

    losses, costs = [F(6, 10), F(15, 10), F(11, 10)], [F(1, 10), F(5, 10), F(7, 10)]
    model = validate_model([float(x) for x in losses], [float(x) for x in costs])
    prior = [F(2, 10), F(6, 10), F(2, 10)]

    def pi(mu, i):
        return sum(mu[k] * losses[k] for k in range(i)) - costs[i - 1]

    upper, lower = [F(4, 10), F(6, 10), F(0)], [F(0), F(6, 10), F(4, 10)]
    assert [(a + b) / 2 for a, b in zip(upper, lower)] == prior
    assert pi(upper, 2) == pi(lower, 3) == F(64, 100)
    assert max(pi(prior, i) for i in (1, 2, 3)) == F(54, 100)

    res = benefit_test(model, [float(x) for x in prior])
    assert res.verdict is Verdict.FALSE
    assert qcav(model, [float(x) for x in prior]).value >= 0.64 - 1e-9



@pytest.mark.parametrize(
    "losses, costs, prior",
    [
        ([1.95, 1.2, 2.6375], [0.45, 0.95, 1.1375], [0.0, 7 / 13, 6 / 13]),
        ([0.5125, 1.0125, 1.7625], [0.0125, 0.5125, 0.7625], [0.0, 4.4408921e-16, 1.0]),
        ([1.45, 1.965625, 2.715625, 2.965625], [0.45, 0.965625, 1.465625, 1.965625],
         [0.0, 0.00744417, 0.9528536, 0.03970223]),
    ],
)
def test_monopoly_prices_with_a_zero_weight_type(losses, costs, prior):
    # at monopoly prices every client action ties at the prior
    model = validate_model(losses, costs)
    p = monopoly_prices(model, prior).prices
    assert p_equilibrium_value(model, prior, p) == pytest.approx(envelope_profit(model, prior), abs=1e-7)
