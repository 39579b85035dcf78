"""Closed forms and the full equilibrium catalogue for two types.

Priors are written ``(1 - q, q)`` with ``q`` the weight on type ``t_2``.  The
catalogue assumes type ``t_2`` has the larger surplus (``s_2 > s_1``); models
with ``s_1 >= s_2`` only get the mirrored envelope formula.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .equilibrium import EquilibriumProfile, ProfileKind, _finish, pure_choices
from .errors import OutOfRegime, SpecInfeasible, WrongArity, WrongOrdering
from .model import EPS_NUM, MarketModel, Splitting
from .profits import envelope_profit


class Regime(str, enum.Enum):
    ABOVE = "above_qhat"
    BELOW = "below_qhat"
    BOUNDARY = "at_qhat_boundary"


@dataclass(frozen=True)
class BinaryEquilibriumSet:
    regime: Regime
    equilibria: List[EquilibriumProfile]
    value_interval: Tuple[float, float]


def _check_binary(model: MarketModel, ordered: bool = True):
    if model.n != 2:
        raise WrongArity(f"binary solver needs N = 2, got N = {model.n}")
    s1, s2 = model.surpluses
    if ordered and not s2 > s1:
        raise WrongOrdering("requires s_2 > s_1; use mirrored_closed_form_qcav for the other case")


def _check_q(q):
    if not 0.0 <= q <= 1.0:
        raise OutOfRegime(f"q = {q} is not a probability")


def qhat(model: MarketModel) -> float:
    """Threshold weight on ``t_2`` below which talking pays: ``(c2-c1)/(l2-l1)``."""
    _check_binary(model)
    (l1, l2), (c1, c2) = model.losses, model.costs
    return float((c2 - c1) / (l2 - l1))


def closed_form_qcav(model: MarketModel, q: float) -> float:
    """Flat at ``s_1`` up to the threshold, then the ``a_2`` monopoly profit."""
    t = qhat(model)
    _check_q(q)
    (l1, l2), (c1, c2) = model.losses, model.costs
    if q <= t:
        return float(l1 - c1)
    return float(q * l2 + (1 - q) * l1 - c2)


def mirrored_closed_form_qcav(model: MarketModel, q: float) -> float:
    """Envelope for ``s_1 >= s_2``.

    Relabelling which type is the efficient one, the envelope is the no-talk
    profit floored at the smaller surplus ``s_2`` on the interior, and the
    degenerate value at either vertex.
    """
    _check_binary(model, ordered=False)
    _check_q(q)
    s1, s2 = model.surpluses
    if s2 > s1:
        raise WrongOrdering("model has s_2 > s_1; use closed_form_qcav")
    if q == 0.0:
        return float(s1)
    if q == 1.0:
        return float(s2)
    return float(max(envelope_profit(model, [1 - q, q]), s2))


def surplus(model: MarketModel, q: float) -> float:
    return float(np.array([1 - q, q]) @ model.surpluses)


def client_value(model: MarketModel, q: float, mu2_weight: float) -> float:
    """Client's gain from the equal-margin profile with upper posterior ``mu2_weight``."""
    t = qhat(model)
    if not 0.0 < q < t:
        raise OutOfRegime(f"q = {q} outside (0, {t})")
    if not t - EPS_NUM <= mu2_weight <= 1.0 + EPS_NUM:
        raise OutOfRegime(f"posterior weight {mu2_weight} outside [{t}, 1]")
    (l1, l2), (c1, c2) = model.losses, model.costs
    return float(q * (l2 - l1) - q / mu2_weight * (c2 - c1))


def no_service_value(model: MarketModel, q: float) -> float:
    return -float(np.array([1 - q, q]) @ model.losses)


def solve_above(model: MarketModel, q: float) -> BinaryEquilibriumSet:
    """The unique silent equilibrium for ``q`` above the threshold."""
    t = qhat(model)
    _check_q(q)
    if q < t - EPS_NUM:
        raise OutOfRegime(f"q = {q} is below the threshold {t}")
    regime = Regime.BOUNDARY if abs(q - t) <= EPS_NUM else Regime.ABOVE
    l1, l2 = model.losses
    prior = np.array([1 - q, q])
    profile = _finish(
        model,
        prior,
        [model.prohibitive_price, q * l2 + (1 - q) * l1],
        Splitting.singleton(prior),
        pure_choices(2, [2]),
        ProfileKind.SILENT,
        (2,),
    )
    return BinaryEquilibriumSet(regime, [profile], (0.0, 0.0))


def _upper_masses(q, spec, masses):
    k = len(spec)
    if masses is None:
        alpha = q / spec.sum()
        masses = np.full(k, alpha)
    else:
        masses = np.asarray(masses, dtype=float)
        if masses.shape != spec.shape or np.any(masses <= 0):
            raise SpecInfeasible("one positive mass per upper posterior is required")
        if abs(masses @ spec - q) > EPS_NUM:
            raise SpecInfeasible("masses do not average the posteriors to the prior")
    if masses.sum() >= 1.0:
        raise SpecInfeasible("no weight left for the posterior (1, 0)")
    return masses


def solve_below(
    model: MarketModel,
    q: float,
    posterior_spec: Sequence[float],
    masses: Optional[Sequence[float]] = None,
) -> BinaryEquilibriumSet:
    """All equilibria whose splitting is ``{(1,0)} + posterior_spec``.

    ``posterior_spec`` lists the ``t_2`` weights of the upper posteriors
    (each at least the threshold).  Their masses default to equal shares;
    pass ``masses`` to fix them.
    """
    t = qhat(model)
    if not 0.0 < q < t:
        raise OutOfRegime(f"q = {q} outside (0, {t})")
    spec = np.asarray(posterior_spec, dtype=float).ravel()
    if spec.size == 0:
        raise SpecInfeasible("at least one upper posterior is required")
    if np.any(np.diff(spec) <= 0):
        raise SpecInfeasible("posterior weights must be strictly ascending")
    if spec[0] < t - EPS_NUM or spec[-1] > 1.0:
        raise SpecInfeasible(f"posterior weights must lie in [{t}, 1]")
    upper = _upper_masses(q, spec, masses)

    (l1, l2), (c1, c2) = model.losses, model.costs
    prior = np.array([1 - q, q])
    weights = np.concatenate(([1 - upper.sum()], upper))
    posteriors = np.column_stack((1 - np.concatenate(([0.0], spec)), np.concatenate(([0.0], spec))))
    splitting = Splitting.build(weights, posteriors).check_plausible(prior)
    k = len(weights)
    equal_margin = [l1, c2 + l1 - c1]

    pure = _finish(
        model, prior, equal_margin, splitting, pure_choices(2, [1] + [2] * (k - 1)),
        ProfileKind.BINARY_PURE, tuple([1] + [2] * (k - 1)),
    )
    profiles = [pure]
    if k == 2 and spec[0] > t + EPS_NUM:
        w = spec[0]
        p2 = l1 + w * (l2 - l1)
        buy = (l1 - c1) / (p2 - c2)
        choices = np.array([[0.0, 1.0, 0.0], [1.0 - buy, 0.0, buy]])
        mixed = _finish(
            model, prior, [l1, p2], splitting, choices, ProfileKind.BINARY_MIXED, (1, 2)
        )
        profiles = [mixed, pure]
    high = surplus(model, q) - closed_form_qcav(model, q)
    return BinaryEquilibriumSet(Regime.BELOW, profiles, (0.0, high))


def services_value(model: MarketModel, q: float, profile: EquilibriumProfile) -> float:
    """Client's ex-ante payoff above her no-service value."""
    return profile.client_payoff - no_service_value(model, q)
