"""Belief-based pricing: monopoly prices, profit hyperplanes, client choice."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, NamedTuple

import numpy as np

from .model import EPS_NUM, MarketModel, PriceList, as_belief, as_prices


@dataclass(frozen=True)
class ProfitSummary:
    """Per-treatment profits at a belief and their upper envelope with 0."""

    per_treatment: np.ndarray
    best: float
    argmax_indices: FrozenSet[int]


@dataclass(frozen=True)
class ValueSet:
    values: FrozenSet[float]
    upper: float


class SurplusStats(NamedTuple):
    surpluses: np.ndarray
    order_stats: np.ndarray  # descending: order_stats[0] is s_(1)
    expected: float


def monopoly_prices(model: MarketModel, mu) -> PriceList:
    """Price making the client indifferent between each treatment and no purchase."""
    mu = as_belief(mu, model.n).weights
    return PriceList(np.cumsum(mu * model.losses))


def hyperplane_profits(model: MarketModel, mu) -> np.ndarray:
    """``pi_i(mu)`` for every treatment; ``mu`` may be a stack of beliefs (rows)."""
    mu = np.asarray(mu, dtype=float)
    return np.cumsum(mu * model.losses, axis=-1) - model.costs


def envelope_profit(model: MarketModel, mu) -> np.ndarray | float:
    """``max(0, pi_1, ..., pi_N)``; vectorized over rows of ``mu``."""
    out = np.maximum(hyperplane_profits(model, mu).max(axis=-1), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def profit_summary(model: MarketModel, mu) -> ProfitSummary:
    pi = hyperplane_profits(model, as_belief(mu, model.n).weights)
    best = max(0.0, float(pi.max()))
    tol = EPS_NUM * max(1.0, abs(best))
    argmax = frozenset(int(i) + 1 for i in np.flatnonzero(pi >= best - tol))
    return ProfitSummary(pi, best, argmax)


def client_utility_matrix(model: MarketModel, p) -> np.ndarray:
    """Utility of each action (rows ``a_0..a_N``) for each type (columns)."""
    n = model.n
    p = np.asarray(p, dtype=float)
    j = np.arange(1, n + 1)[:, None]
    h = np.arange(1, n + 1)[None, :]
    untreated = np.where(h > j, model.losses[None, :], 0.0)
    u = np.empty((n + 1, n))
    u[0] = -model.losses
    u[1:] = -p[:, None] - untreated
    return u


def client_utilities(model: MarketModel, mu, p) -> np.ndarray:
    """Expected utility of ``a_0..a_N`` at belief ``mu`` under price list ``p``."""
    mu = as_belief(mu, model.n).weights
    return client_utility_matrix(model, as_prices(p).prices) @ mu


def client_best_response(model: MarketModel, mu, p) -> FrozenSet[int]:
    u = client_utilities(model, mu, p)
    return frozenset(int(a) for a in np.flatnonzero(u >= u.max() - EPS_NUM))


def expert_payoffs(model: MarketModel, p) -> np.ndarray:
    """Expert payoff of each action ``a_0..a_N``: 0 and ``p_j - c_j``."""
    return np.concatenate(([0.0], np.asarray(p, dtype=float) - model.costs))


def expert_value(model: MarketModel, mu, p) -> ValueSet:
    p = as_prices(p)
    payoff = expert_payoffs(model, p.prices)
    values = frozenset(float(payoff[a]) for a in client_best_response(model, mu, p))
    return ValueSet(values, max(values))


def surplus_stats(model: MarketModel, mu) -> SurplusStats:
    mu = as_belief(mu, model.n).weights
    s = model.surpluses
    return SurplusStats(s, np.sort(s)[::-1], float(mu @ s))


def second_highest_surplus(model: MarketModel) -> float:
    """``s_(2)``; ``-inf`` for a one-type model."""
    s = np.sort(model.surpluses)[::-1]
    return float(s[1]) if s.size > 1 else -np.inf
