"""Quasiconcave envelope of the belief-based profit function.

The envelope value at a prior is the highest level ``v`` that the prior can
*secure*: some splitting of the prior keeps ``max(0, pi_1, .., pi_N) >= v`` at
every posterior.  Securability of a fixed level is a linear feasibility
problem over the union of the polytopes ``{pi_i >= v}`` (see
:mod:`credence.lp`); the envelope is found by bisection on ``v``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import lp
from .errors import BracketFailure, SolverFailure
from .model import (
    EPS_EQ,
    EPS_NUM,
    MarketModel,
    Splitting,
    _frozen,
    as_belief,
    as_prices,
    embed,
    reduce_support,
)
from .profits import (
    client_utility_matrix,
    envelope_profit,
    expert_payoffs,
    hyperplane_profits,
    second_highest_surplus,
)

EPS_BIS = 1e-9
_INACTIVE = 1e-12
_BACKOFF = 10 * EPS_BIS


@dataclass(frozen=True)
class SecurabilityWitness:
    """A splitting whose posteriors all reach ``level``.

    ``branches[k]`` is the treatment whose profit hyperplane reaches the level
    at posterior ``k`` (0 for the no-trade branch).
    """

    level: float
    splitting: Splitting
    branches: Tuple[int, ...]


@dataclass(frozen=True)
class LevelSplitting:
    """Splitting with every posterior exactly on the envelope value.

    At most N posteriors; posterior ``k`` is maximized by the profit hyperplane
    of treatment ``indices[k]`` and the indices are distinct.
    """

    value: float
    splitting: Splitting
    indices: Tuple[int, ...]


class Verdict(enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    BOUNDARY = "BOUNDARY"


@dataclass(frozen=True)
class BenefitResult:
    verdict: Verdict
    profit: float
    second_surplus: float
    witness: Optional[LevelSplitting] = None


def _maximizing_index(model: MarketModel, mu) -> int:
    pi = hyperplane_profits(model, mu)
    top = pi.max()
    if top < -EPS_NUM:
        return 0
    return int(np.flatnonzero(pi >= top - EPS_NUM * max(1.0, abs(top)))[0]) + 1


def _singleton_witness(model, prior, level) -> SecurabilityWitness:
    return SecurabilityWitness(
        float(level), Splitting.singleton(prior), (_maximizing_index(model, prior.weights),)
    )


def _witness_from_lift(model, prior, z, level) -> SecurabilityWitness:
    n = model.n
    z = z.reshape(n, n)
    active = np.flatnonzero(z.sum(axis=1) >= _INACTIVE)
    z = z[active]
    # pivoting round-off leaves the type totals slightly off the prior; rescale
    totals = z.sum(axis=0)
    live = totals > 0
    z[:, live] *= prior.weights[live] / totals[live]
    mass = z.sum(axis=1)
    posteriors = z / mass[:, None]
    weights = mass / mass.sum()
    splitting = Splitting.build(weights, posteriors)
    splitting.check_plausible(prior.weights)
    return SecurabilityWitness(float(level), splitting, tuple(int(i) + 1 for i in active))


def securable(model: MarketModel, prior, v: float):
    """Decide whether ``prior`` can secure level ``v``.

    Returns ``(feasible, witness)``; ``witness`` is ``None`` when infeasible.
    """
    prior = as_belief(prior, model.n)
    if v <= envelope_profit(model, prior.weights) + EPS_NUM:
        return True, _singleton_witness(model, prior, v)
    status, z = lp.level_feasible(model.losses, model.costs, prior.weights, float(v), lp.LP_TOL)
    if status == lp.PIVOT_LIMIT:
        raise SolverFailure(f"securability program at level {v} hit the pivot limit")
    if status == lp.INFEASIBLE:
        return False, None
    return True, _witness_from_lift(model, prior, z, v)


def _segment_crossing(model, prior, mu, v) -> float:
    """Fraction ``t`` with ``pi_bar(mu + t (prior - mu)) == v``.

    Along the segment each hyperplane is affine in ``t`` and the envelope is
    convex, so the crossing is where the last hyperplane above ``v`` drops to
    it.
    """
    start = hyperplane_profits(model, mu)
    slope = hyperplane_profits(model, prior) - start
    above = start >= v
    if not np.any(above) or np.any(slope[above] >= 0):
        raise BracketFailure(f"no crossing of level {v} between posterior and prior")
    t = np.max((start[above] - v) / -slope[above])
    if not 0.0 <= t < 1.0:
        raise BracketFailure(f"level crossing at t={t} outside the segment")
    return float(t)


def refine_to_level(model: MarketModel, prior, witness: SecurabilityWitness, v: float) -> SecurabilityWitness:
    """Pull every posterior that overshoots ``v`` back toward the prior.

    The replacement lies on the segment to the prior where the envelope equals
    ``v``; weights are rebalanced so the splitting still averages to the prior.
    """
    prior = as_belief(prior, model.n).weights
    if envelope_profit(model, prior) >= v:
        raise BracketFailure("prior already secures the level; nothing to refine")
    weights = witness.splitting.weights.copy()
    posteriors = witness.splitting.posteriors.copy()
    changed = False
    for k in range(len(weights)):
        if envelope_profit(model, posteriors[k]) <= v + _INACTIVE:
            continue
        t = _segment_crossing(model, prior, posteriors[k], v)
        posteriors[k] = posteriors[k] + t * (prior - posteriors[k])
        denom = t * weights[k] + 1.0 - t
        others = np.arange(len(weights)) != k
        weights[others] *= (1.0 - t) / denom
        weights[k] /= denom
        changed = True
    if not changed:
        return witness
    splitting = Splitting.build(weights, posteriors).check_plausible(prior)
    branches = tuple(_maximizing_index(model, mu) for mu in splitting.posteriors)
    return SecurabilityWitness(float(v), splitting, branches)


def merge_by_index(model: MarketModel, witness: SecurabilityWitness) -> LevelSplitting:
    """Average together posteriors that share a maximizing hyperplane."""
    split = witness.splitting
    index = [_maximizing_index(model, mu) for mu in split.posteriors]
    order = sorted(set(index))
    weights, posteriors = [], []
    for i in order:
        members = [k for k, j in enumerate(index) if j == i]
        w = split.weights[members]
        weights.append(w.sum())
        posteriors.append(w @ split.posteriors[members] / w.sum())
    merged = Splitting(_frozen(np.array(weights) / np.sum(weights)), _frozen(np.array(posteriors)))
    return LevelSplitting(witness.level, merged, tuple(order))


def qcav(model: MarketModel, prior) -> LevelSplitting:
    """Envelope value at ``prior`` with an equal-level splitting attaining it."""
    prior = as_belief(prior, model.n)
    base = envelope_profit(model, prior.weights)
    top = float(model.surpluses.max())
    if base >= top:
        return LevelSplitting(base, Splitting.singleton(prior), (_maximizing_index(model, prior.weights),))
    status, value = lp.bisect_level(
        model.losses, model.costs, prior.weights, base, top, EPS_BIS, lp.LP_TOL
    )
    if status == lp.PIVOT_LIMIT:
        raise SolverFailure("securability program hit the pivot limit during bisection")
    if value - base <= EPS_EQ:
        return LevelSplitting(value, Splitting.singleton(prior), (_maximizing_index(model, prior.weights),))
    level = max(value - _BACKOFF, base + 0.5 * (value - base))
    ok, witness = securable(model, prior, level)
    if not ok:
        raise SolverFailure(f"level {level} below the bisection result is not securable")
    witness = refine_to_level(model, prior, witness, level)
    merged = merge_by_index(model, witness)
    return LevelSplitting(float(value), merged.splitting, merged.indices)


def qcav_value(model: MarketModel, prior) -> float:
    return qcav(model, prior).value


def _response_system(model, prior, p, actions):
    """Lifted system: prior split over best-response regions of ``actions``.

    Only types in the support of ``prior`` get variables; zero-mass types
    would add degenerate rows and nothing else.
    """
    support = np.flatnonzero(prior > _INACTIVE)
    prior = prior[support]
    n = len(support)
    u = client_utility_matrix(model, p)[:, support]
    n_act = len(actions)
    A_eq = np.zeros((n, n_act * n))
    rows = []
    for r, a in enumerate(actions):
        A_eq[:, r * n:(r + 1) * n] = np.eye(n)
        for b in range(model.n + 1):
            if b == a:
                continue
            row = np.zeros(n_act * n)
            # u_b . z <= u_a . z + eps * mass
            row[r * n:(r + 1) * n] = u[b] - u[a] - EPS_NUM
            rows.append(row)
    A_ub = np.array(rows) if rows else np.zeros((0, n_act * n))
    return A_eq, prior, A_ub, np.zeros(len(rows))


def p_equilibrium_value(model: MarketModel, prior, p) -> float:
    """Expert's best payoff in the communication subgame after posting ``p``.

    The expert's value correspondence only takes the values ``0`` and
    ``p_j - c_j``; the answer is the largest such level at which the prior
    splits over best-response regions of actions paying at least that level.
    """
    prior = as_belief(prior, model.n).weights
    p = as_prices(p).prices
    pay = expert_payoffs(model, p)
    # staying silent already gets the expert-favourable best response at the prior
    u = client_utility_matrix(model, p) @ prior
    floor = float(pay[u >= u.max() - EPS_NUM].max())
    for level in sorted(set(pay.tolist()), reverse=True):
        if level <= floor:
            return floor
        actions = [a for a in range(model.n + 1) if pay[a] >= level - EPS_NUM]
        A_eq, b_eq, A_ub, b_ub = _response_system(model, prior, p, actions)
        if lp.find_feasible(A_eq, b_eq, A_ub, b_ub) is not None:
            return float(level)
    raise SolverFailure("no candidate level is feasible; best-response regions failed to cover the prior")


def benefit_test(model: MarketModel, prior) -> BenefitResult:
    """Does cheap talk raise the expert's payoff above the no-talk profit?

    Decided by comparing the no-talk profit with the second-highest surplus on
    the support of the prior.  A ``TRUE`` verdict carries the equal-level
    splitting as witness, lifted back to the original coordinates.
    """
    full = as_belief(prior, model.n)
    reduced, rprior, index_map = reduce_support(model, full)
    profit = envelope_profit(reduced, rprior.weights)
    s2 = second_highest_surplus(reduced)
    if profit < s2 - EPS_EQ:
        verdict = Verdict.TRUE
    elif profit > s2 + EPS_EQ:
        verdict = Verdict.FALSE
    else:
        verdict = Verdict.BOUNDARY
    witness = None
    if verdict is Verdict.TRUE:
        ls = qcav(reduced, rprior)
        posts = np.array([embed(mu, index_map, model.n) for mu in ls.splitting.posteriors])
        witness = LevelSplitting(
            ls.value,
            Splitting(ls.splitting.weights, _frozen(posts)),
            tuple(index_map[i - 1] if i > 0 else 0 for i in ls.indices),
        )
    return BenefitResult(verdict, float(profit), float(s2), witness)
