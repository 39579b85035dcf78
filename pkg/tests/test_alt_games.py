import numpy as np
import pytest
from dataclasses import replace

from credence import (
    PriceList,
    SignalPricingPair,
    Splitting,
    client_worst_equilibrium,
    flw_from_client_worst,
    flw_verify,
    path_probabilities,
    relabeled_paths,
    silent_equilibrium,
    transform_nonsignalling,
)
from credence.alt_games import FlwProfile, pricing_is_message_only
from credence.equilibrium import ProfileKind, _finish, pure_choices
from credence.errors import ModelError, NotClientWorst

from _support import B1


def test_type_dependent_prices_get_fresh_messages():
    pair = SignalPricingPair(
        {1: {"m1": 1.0}, 2: {"m1": 1.0}},
        {(1, "m1"): (1.0, 1.6), (2, "m1"): (1.0, 1.8)},
    )
    out = transform_nonsignalling(pair)
    assert out.signalling == {1: {(1, 1): 1.0}, 2: {(1, 2): 1.0}}
    assert out.pricing[(1, (1, 1))] == (1.0, 1.6)
    assert out.pricing[(2, (1, 2))] == (1.0, 1.8)
    assert pricing_is_message_only(out)
    assert relabeled_paths(pair, out) == path_probabilities(pair)


def test_message_only_pricing_is_relabelled_identity():
    pair = SignalPricingPair(
        {1: {"a": 0.3, "b": 0.7}, 2: {"a": 1.0}},
        {(1, "a"): (1.0, 1.6), (1, "b"): (0.5, 2.0), (2, "a"): (1.0, 1.6)},
    )
    out = transform_nonsignalling(pair)
    assert out.signalling == {1: {(1, 1): 0.3, (2, 2): 0.7}, 2: {(1, 1): 1.0}}
    assert relabeled_paths(pair, out) == path_probabilities(pair)


def test_mixed_messages_with_type_dependent_prices():
    prior = np.array([0.4, 0.6])
    pair = SignalPricingPair(
        {1: {"a": 0.25, "b": 0.75}, 2: {"a": 0.5, "b": 0.5}},
        {(1, "a"): (1.0, 1.6), (1, "b"): (1.0, 2.0), (2, "a"): (0.9, 1.6), (2, "b"): (1.0, 2.0)},
    )
    out = transform_nonsignalling(pair)
    assert pricing_is_message_only(out)
    assert relabeled_paths(pair, out, prior) == path_probabilities(pair, prior)
    assert len(path_probabilities(pair)) == 4


def test_pair_validation():
    with pytest.raises(ModelError):
        SignalPricingPair({1: {"a": 0.5}}, {(1, "a"): (1.0,)})
    with pytest.raises(ModelError):
        SignalPricingPair({1: {"a": 1.0}}, {})


def test_flw_from_binary_client_worst():
    prof = client_worst_equilibrium(B1, [0.5, 0.5])
    flw = flw_from_client_worst(B1, [0.5, 0.5], prof)
    np.testing.assert_allclose(flw.prices.prices, [1.0, 1.6], atol=1e-6)
    np.testing.assert_allclose(flw.recommendation, [[0, 1 / 3, 2 / 3], [0, 0, 1]], atol=1e-6)
    assert flw.expert_payoff == pytest.approx(0.8, abs=1e-6)
    report = flw_verify(B1, [0.5, 0.5], flw)
    assert report.passed, report.failures()
    assert report.expert_payoff == pytest.approx(0.8, abs=1e-6)


def test_flw_raised_price_fails_acceptance():
    flw = flw_from_client_worst(B1, [0.5, 0.5], client_worst_equilibrium(B1, [0.5, 0.5]))
    bad = replace(flw, prices=PriceList([flw.prices[0], 1.7]))
    report = flw_verify(B1, [0.5, 0.5], bad)
    assert "acceptance" in report.failures()
    assert "a_2" in report.checks["acceptance"].detail


def test_flw_degenerate_prior():
    prior = np.array([0.0, 1.0])
    single = _finish(
        B1, prior, [B1.prohibitive_price, 2.0], Splitting.singleton(prior),
        pure_choices(2, [2]), ProfileKind.CLIENT_WORST, (2,),
    )
    flw = flw_from_client_worst(B1, prior, single)
    assert flw.prices[1] == pytest.approx(2.0)
    np.testing.assert_allclose(flw.recommendation[:, 2], [1.0, 1.0])
    assert flw_verify(B1, prior, flw).passed


def test_flw_rejects_silent_profile():
    with pytest.raises(NotClientWorst):
        flw_from_client_worst(B1, [0.2, 0.8], silent_equilibrium(B1, [0.2, 0.8]))


def test_flw_recommend_always_above_threshold():
    gamma = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
    flw = FlwProfile(PriceList([B1.prohibitive_price, 1.7]), gamma, np.array([0.0, 1.0, 1.0]), 0.9)
    report = flw_verify(B1, [0.3, 0.7], flw)
    assert report.passed, report.failures()
    assert report.expert_payoff == pytest.approx(0.9)
