"""Construction and verification of p-equilibrium profiles.

Messages are identified with posteriors: a profile stores the splitting of
the prior, the client's (possibly mixed) choice at each posterior and the
posted price list.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np

from .envelope import LevelSplitting, qcav
from .errors import ConstructionCheckFailed, ModelError, NotApplicable
from .model import (
    EPS_EQ,
    EPS_NUM,
    MarketModel,
    PriceList,
    Splitting,
    _frozen,
    as_belief,
    as_prices,
)
from .profits import (
    client_utility_matrix,
    envelope_profit,
    expert_payoffs,
    monopoly_prices,
    profit_summary,
)


class ProfileKind(str, enum.Enum):
    SILENT = "silent"
    CLIENT_WORST = "client_worst"
    BINARY_PURE = "binary_pure"
    BINARY_MIXED = "binary_mixed"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class EquilibriumProfile:
    """Price list, splitting and per-posterior client choice.

    ``choices[k]`` is a distribution over actions ``a_0..a_N`` at posterior
    ``k``.  ``indices`` optionally records the treatment each posterior
    targets (client-worst constructions).
    """

    prices: PriceList
    splitting: Splitting
    choices: np.ndarray
    expert_payoff: float
    client_payoff: float
    kind: ProfileKind = ProfileKind.CUSTOM
    indices: Optional[tuple] = None
    prior: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.prices)


@dataclass(frozen=True)
class CheckResult:
    slack: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.slack >= -EPS_EQ


@dataclass(frozen=True)
class VerificationReport:
    checks: Dict[str, CheckResult]
    expert_payoff: Optional[float] = None
    client_payoff: Optional[float] = None
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", all(c.passed for c in self.checks.values()))

    def failures(self):
        return [name for name, c in self.checks.items() if not c.passed]


def pure_choices(n: int, actions) -> np.ndarray:
    out = np.zeros((len(actions), n + 1))
    out[np.arange(len(actions)), list(actions)] = 1.0
    return out


def evaluate_profile(model: MarketModel, prior, profile: EquilibriumProfile):
    """Ex-ante ``(expert payoff, client payoff)`` of a profile."""
    p = profile.prices.prices
    pay = expert_payoffs(model, p)
    u = client_utility_matrix(model, p)
    split = profile.splitting
    per_post_expert = profile.choices @ pay
    per_post_client = np.einsum("ka,ah,kh->k", profile.choices, u, split.posteriors)
    return float(split.weights @ per_post_expert), float(split.weights @ per_post_client)


def _off_path_payoff(model: MarketModel, p) -> float:
    """Best payoff from an unused message: the client then puts all weight on
    a lowest-surplus type and the expert gets his favourite best response."""
    s = model.surpluses
    u = client_utility_matrix(model, p)
    pay = expert_payoffs(model, p)
    worst = np.flatnonzero(s <= s.min() + EPS_NUM)
    best = -np.inf
    for j in worst:
        uj = u[:, j]
        br = uj >= uj.max() - EPS_NUM
        best = max(best, float(pay[br].max()))
    return best


def verify_p_equilibrium(model: MarketModel, prior, profile: EquilibriumProfile) -> VerificationReport:
    """Check a profile against the p-equilibrium conditions.

    Every check reports its worst slack; the profile passes when all slacks
    are at least ``-EPS_EQ``.
    """
    prior = as_belief(prior, model.n).weights
    p = profile.prices.prices
    split = profile.splitting
    checks = {}

    mean_gap = split.plausibility_error(prior)
    weight_gap = abs(float(split.weights.sum()) - 1.0)
    checks["bayes_plausibility"] = CheckResult(-max(mean_gap, weight_gap), f"mean gap {mean_gap:.3e}")

    u = client_utility_matrix(model, p)
    choice_gap = float(np.max(np.abs(profile.choices.sum(axis=1) - 1.0)))
    worst, where = -choice_gap, "choice distributions" if choice_gap > EPS_EQ else ""
    if profile.choices.min() < -EPS_EQ:
        worst, where = min(worst, float(profile.choices.min())), "negative choice probability"
    for k, mu in enumerate(split.posteriors):
        utils = u @ mu
        for a in np.flatnonzero(profile.choices[k] > 0):
            slack = float(utils[a] - utils.max())
            if slack < worst:
                worst, where = slack, f"posterior {k} ({mu.tolist()}), action a_{a}"
    checks["client_optimality"] = CheckResult(worst, where)

    pay = expert_payoffs(model, p)
    per_post = profile.choices @ pay
    live = per_post[split.weights > 0]
    spread = float(live.max() - live.min()) if live.size else 0.0
    checks["expert_indifference"] = CheckResult(-spread, f"payoff spread {spread:.3e}")

    off = _off_path_payoff(model, p)
    checks["off_path_deviation"] = CheckResult(float(live.min() - off), f"off-path payoff {off:.6g}")

    expert, client = evaluate_profile(model, prior, profile)
    gap = max(abs(expert - profile.expert_payoff), abs(client - profile.client_payoff))
    checks["payoff_consistency"] = CheckResult(-gap, f"evaluated ({expert:.9g}, {client:.9g})")
    return VerificationReport(checks, expert, client)


def _finish(model, prior, prices, splitting, choices, kind, indices=None):
    draft = EquilibriumProfile(
        PriceList(prices), splitting, _frozen(choices), 0.0, 0.0, kind, indices, _frozen(prior)
    )
    expert, client = evaluate_profile(model, prior, draft)
    return replace(draft, expert_payoff=expert, client_payoff=client)


def silent_equilibrium(model: MarketModel, prior, envelope: Optional[LevelSplitting] = None) -> EquilibriumProfile:
    """No information, monopoly prices at the prior, client buys an argmax treatment."""
    prior = as_belief(prior, model.n)
    env = envelope or qcav(model, prior)
    base = envelope_profit(model, prior.weights)
    if env.value > base + EPS_EQ:
        raise NotApplicable(f"envelope {env.value:.9g} exceeds the no-talk profit {base:.9g}")
    summary = profit_summary(model, prior)
    action = min(summary.argmax_indices) if summary.argmax_indices else 0
    return _finish(
        model,
        prior.weights,
        monopoly_prices(model, prior).prices,
        Splitting.singleton(prior),
        pure_choices(model.n, [action]),
        ProfileKind.SILENT,
        (action,),
    )


def client_worst_equilibrium(model: MarketModel, prior, envelope: Optional[LevelSplitting] = None) -> EquilibriumProfile:
    """Equal-level splitting priced at each posterior's monopoly price.

    Unused treatments get the prohibitive price; the client buys the targeted
    treatment at every posterior and is held to her no-service value.
    """
    prior = as_belief(prior, model.n)
    env = envelope or qcav(model, prior)
    base = envelope_profit(model, prior.weights)
    if env.value <= base + EPS_EQ:
        raise NotApplicable("the envelope equals the no-talk profit; use the silent equilibrium")
    split, idx = env.splitting, env.indices
    if 0 in idx:
        raise ConstructionCheckFailed(idx.index(0), idx.index(0), -np.inf)
    prices = np.full(model.n, model.prohibitive_price)
    for mu, i in zip(split.posteriors, idx):
        prices[i - 1] = float(np.cumsum(mu * model.losses)[i - 1])
    u = client_utility_matrix(model, prices)
    for k, mu in enumerate(split.posteriors):
        utils = u @ mu
        for ell, j in enumerate(idx):
            slack = float(utils[idx[k]] - utils[j])
            if slack < -EPS_EQ:
                raise ConstructionCheckFailed(k, ell, slack)
    return _finish(
        model,
        prior.weights,
        prices,
        split,
        pure_choices(model.n, idx),
        ProfileKind.CLIENT_WORST,
        tuple(idx),
    )


def solve_equilibrium(model: MarketModel, prior) -> EquilibriumProfile:
    """Silent equilibrium when talk does not help, else the client-worst one."""
    env = qcav(model, prior)
    if env.value > envelope_profit(model, as_belief(prior, model.n).weights) + EPS_EQ:
        return client_worst_equilibrium(model, prior, env)
    return silent_equilibrium(model, prior, env)


# -- serialization ------------------------------------------------------------


def _num(x, digits):
    x = float(x)
    return float(f"{x:.{digits}g}") if digits else x


def profile_to_dict(profile: EquilibriumProfile, digits: Optional[int] = None) -> dict:
    doc = {"kind": profile.kind.value}
    if profile.prior is not None:
        doc["prior"] = [_num(x, digits) for x in profile.prior]
    doc["prices"] = [_num(x, digits) for x in profile.prices.prices]
    doc["splitting"] = [
        {
            "weight": _num(w, digits),
            "posterior": [_num(x, digits) for x in mu],
            "choice": [_num(x, digits) for x in profile.choices[k]],
        }
        for k, (w, mu) in enumerate(profile.splitting)
    ]
    if profile.indices is not None:
        doc["indices"] = list(profile.indices)
    doc["expert_payoff"] = _num(profile.expert_payoff, digits)
    doc["client_payoff"] = _num(profile.client_payoff, digits)
    return doc


def profile_from_dict(doc: dict) -> EquilibriumProfile:
    try:
        entries = doc["splitting"]
        weights = np.array([e["weight"] for e in entries], dtype=float)
        posteriors = np.array([e["posterior"] for e in entries], dtype=float)
        choices = np.array([e["choice"] for e in entries], dtype=float)
        prices = as_prices(doc["prices"])
        expert, client = float(doc["expert_payoff"]), float(doc["client_payoff"])
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed profile document: {exc}") from None
    if posteriors.ndim != 2 or choices.shape != (len(weights), len(prices) + 1):
        raise ModelError("profile arrays have inconsistent shapes")
    prior = doc.get("prior")
    indices = doc.get("indices")
    return EquilibriumProfile(
        prices,
        Splitting(_frozen(weights), _frozen(posteriors)),
        _frozen(choices),
        expert,
        client,
        ProfileKind(doc.get("kind", "custom")),
        tuple(indices) if indices is not None else None,
        _frozen(prior) if prior is not None else None,
    )


def dumps_profile(profile: EquilibriumProfile, digits: Optional[int] = None) -> str:
    return json.dumps(profile_to_dict(profile, digits), indent=2)


def loads_profile(text: str) -> EquilibriumProfile:
    return profile_from_dict(json.loads(text))
