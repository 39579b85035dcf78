"""Alternative games: pricing after talk, and accept/reject recommendations.

Two constructions live here.  :func:`transform_nonsignalling` rewrites a
message-then-price strategy so that prices carry no information beyond the
message.  :func:`flw_from_client_worst` turns a client-worst equilibrium into
a uniform-price, recommend-and-accept profile with the same expert payoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, Mapping, Tuple

import numpy as np

from .equilibrium import (
    CheckResult,
    EquilibriumProfile,
    ProfileKind,
    VerificationReport,
)
from .errors import ModelError, NotClientWorst
from .model import EPS_EQ, EPS_NUM, MarketModel, PriceList, as_belief
from .profits import client_utility_matrix, expert_payoffs

PriceTuple = Tuple[float, ...]


@dataclass(frozen=True)
class SignalPricingPair:
    """Signalling ``sigma(m | t)`` and pricing ``p(t, m)``.

    ``signalling[t]`` maps message labels to probabilities for (1-based) type
    ``t``; ``pricing[(t, m)]`` is the price list posted by type ``t`` after
    sending ``m``.
    """

    signalling: Mapping[int, Mapping[Hashable, float]]
    pricing: Mapping[Tuple[int, Hashable], PriceTuple]

    def __post_init__(self):
        for t, dist in self.signalling.items():
            probs = np.array(list(dist.values()), dtype=float)
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > EPS_NUM:
                raise ModelError(f"signalling of type {t} is not a distribution")
            for m, pr in dist.items():
                if pr > 0 and (t, m) not in self.pricing:
                    raise ModelError(f"no price list for type {t} after message {m!r}")

    @property
    def types(self):
        return sorted(self.signalling)

    def messages(self):
        """Messages sent with positive probability, in first-use order."""
        seen = {}
        for t in self.types:
            for m, pr in self.signalling[t].items():
                if pr > 0:
                    seen.setdefault(m, None)
        return list(seen)


def transform_nonsignalling(pair: SignalPricingPair) -> SignalPricingPair:
    """Fold the price list into the message label.

    The new label of (message ``m_j``, price list ``p^k``) is ``(j, k)``: both
    indices count from 1 in order of first use.  Observing the new label tells
    the client exactly what the old (message, price list) pair did, and the
    posted price depends on the label alone.
    """
    msgs = pair.messages()
    price_index = {prices: k for k, prices in enumerate(_price_lists(pair), start=1)}
    signalling, pricing = {}, {}
    label_price = {}
    for t in pair.types:
        dist = {}
        for j, m in enumerate(msgs, start=1):
            pr = pair.signalling[t].get(m, 0.0)
            if pr > 0:
                prices = tuple(pair.pricing[(t, m)])
                label = (j, price_index[prices])
                dist[label] = pr
                label_price[label] = prices
        signalling[t] = dist
    for t in pair.types:
        for label, prices in label_price.items():
            pricing[(t, label)] = prices
    return SignalPricingPair(signalling, pricing)


def _price_lists(pair: SignalPricingPair):
    """Distinct on-path price lists in first-use order (types, then messages)."""
    seen: Dict[PriceTuple, None] = {}
    msgs = pair.messages()
    for t in pair.types:
        for m in msgs:
            if pair.signalling[t].get(m, 0.0) > 0:
                seen.setdefault(tuple(pair.pricing[(t, m)]), None)
    return list(seen)


def path_probabilities(pair: SignalPricingPair, prior=None):
    """Probability of each (type, client information, price list) path.

    Client information is the (message, price list) pair.  With ``prior`` the
    probabilities are joint; otherwise they are conditional on the type.
    """
    out = {}
    for t in pair.types:
        base = 1.0 if prior is None else float(np.asarray(prior)[t - 1])
        for m, pr in pair.signalling[t].items():
            if pr > 0:
                prices = tuple(pair.pricing[(t, m)])
                out[(t, (m, prices), prices)] = base * pr
    return out


def relabeled_paths(original: SignalPricingPair, transformed: SignalPricingPair, prior=None):
    """Paths of ``transformed`` rewritten in the information of ``original``.

    Label ``(j, k)`` stands for message ``m_j`` observed with price list
    ``p^k``; the result is directly comparable with
    ``path_probabilities(original)``.
    """
    msgs = original.messages()
    plists = _price_lists(original)
    out = {}
    for (t, (label, _), posted), pr in path_probabilities(transformed, prior).items():
        j, k = label
        key = (t, (msgs[j - 1], plists[k - 1]), posted)
        out[key] = out.get(key, 0.0) + pr
    return out


def pricing_is_message_only(pair: SignalPricingPair) -> bool:
    by_message = {}
    for t in pair.types:
        for m, pr in pair.signalling[t].items():
            if pr > 0:
                prices = tuple(pair.pricing[(t, m)])
                if by_message.setdefault(m, prices) != prices:
                    return False
    return True


@dataclass(frozen=True, eq=False)
class FlwProfile:
    """Uniform prices, per-type recommendation mix, per-recommendation acceptance.

    ``recommendation[t - 1, a]`` is the probability that type ``t`` is told to
    take action ``a`` (0 = refuse service); ``acceptance[a]`` is the chance
    the client accepts recommendation ``a``.
    """

    prices: PriceList
    recommendation: np.ndarray
    acceptance: np.ndarray
    expert_payoff: float


def _is_client_worst_shape(model, profile: EquilibriumProfile) -> bool:
    if profile.kind is not ProfileKind.CLIENT_WORST or profile.indices is None:
        return False
    if len(set(profile.indices)) != len(profile.indices) or 0 in profile.indices:
        return False
    choices = profile.choices
    return bool(np.allclose(choices[np.arange(len(choices)), list(profile.indices)], 1.0))


def flw_from_client_worst(model: MarketModel, prior, profile: EquilibriumProfile) -> FlwProfile:
    """Recommend the targeted treatment of each posterior at uniform prices.

    Type-conditional recommendation odds follow from Bayes' rule:
    ``gamma(a_{i_k} | t) = lambda_k mu^k(t) / prior(t)``.
    """
    prior = as_belief(prior, model.n).weights
    if not _is_client_worst_shape(model, profile):
        raise NotClientWorst(f"profile of kind {profile.kind.value!r} is not a client-worst construction")
    n = model.n
    prices = np.full(n, model.prohibitive_price)
    gamma = np.zeros((n, n + 1))
    split = profile.splitting
    for (w, mu), i in zip(split, profile.indices):
        prices[i - 1] = float(np.cumsum(mu * model.losses)[i - 1])
        gamma[:, i] += w * mu
    live = prior > 0
    gamma[live] /= prior[live, None]
    # zero-probability types never move the posterior; park them on the first recommendation
    gamma[~live, profile.indices[0]] = 1.0
    gamma /= gamma.sum(axis=1, keepdims=True)
    acceptance = np.ones(n + 1)
    acceptance[0] = 0.0
    payoff = float(split.weights @ (prices[np.array(profile.indices) - 1] - model.costs[np.array(profile.indices) - 1]))
    return FlwProfile(PriceList(prices), gamma, acceptance, payoff)


def flw_verify(model: MarketModel, prior, flw: FlwProfile) -> VerificationReport:
    """Check acceptance optimality, expert indifference and payoff consistency."""
    prior = as_belief(prior, model.n).weights
    p = flw.prices.prices
    n = model.n
    u = client_utility_matrix(model, p)
    pay = expert_payoffs(model, p)
    gamma = flw.recommendation
    checks = {}

    row_gap = float(np.max(np.abs(gamma.sum(axis=1) - 1.0)))
    mass = prior @ gamma
    worst, where = -row_gap, ""
    for a in range(1, n + 1):
        if mass[a] <= EPS_NUM:
            continue
        post = prior * gamma[:, a] / mass[a]
        gain = float(u[a] @ post - u[0] @ post)
        acc = flw.acceptance[a]
        slack = gain if acc >= 1.0 else (-gain if acc <= 0.0 else -abs(gain))
        if slack < worst:
            worst, where = slack, f"recommendation a_{a} at posterior {post.tolist()}"
    checks["acceptance"] = CheckResult(worst, where)

    rec_value = flw.acceptance * pay
    rec_value[0] = 0.0
    spread = 0.0
    per_type = np.zeros(n)
    for t in range(n):
        on = np.flatnonzero(gamma[t] > EPS_NUM)
        vals = rec_value[on]
        spread = max(spread, float(vals.max() - vals.min()))
        per_type[t] = gamma[t] @ rec_value
    checks["expert_indifference"] = CheckResult(-spread, f"payoff spread {spread:.3e}")

    s = model.surpluses
    off = 0.0
    for a in range(1, n + 1):
        if mass[a] > EPS_NUM:
            continue
        for j in np.flatnonzero(s <= s.min() + EPS_NUM):
            if u[a, j] >= u[0, j] - EPS_NUM:
                off = max(off, float(pay[a]))
    on_min = min(float(rec_value[a]) for a in range(n + 1) if mass[a] > EPS_NUM)
    checks["off_path_deviation"] = CheckResult(on_min - off, f"off-path payoff {off:.6g}")

    expert = float(prior @ per_type)
    gap = abs(expert - flw.expert_payoff)
    checks["payoff_consistency"] = CheckResult(-gap, f"evaluated {expert:.9g}")
    return VerificationReport(checks, expert)
