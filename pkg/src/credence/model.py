"""Game data: market parameters, beliefs, splittings and price lists.

Conventions
-----------
Types ``t_1..t_N`` and treatments ``a_1..a_N`` are labelled 1-based wherever
they appear as *labels* (action indices, branch indices, error indices);
``a_0`` is the no-purchase action.  Arrays are stored 0-based as usual, so
treatment ``a_j`` lives at ``prices[j - 1]``.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BayesPlausibilityError,
    EmptySupport,
    InvalidBelief,
    InvalidPriceList,
    LengthMismatch,
    ModelError,
    NonIncreasingCosts,
    NonPositiveSurplus,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EPS_NUM = 1e-9
EPS_EQ = 1e-7
NO_PURCHASE = 0

_SUM_TOL = 1e-12
_NORMALIZE_TOL = 1e-9
_PLAUSIBLE_TOL = 1e-10


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MarketModel:
    """Losses ``l`` and costs ``c`` of the N-by-N credence-goods game.

    Construct through :func:`validate_model`, which enforces increasing costs
    and positive surpluses.
    """

    losses: np.ndarray
    costs: np.ndarray

    @property
    def n(self) -> int:
        return len(self.losses)

    @property
    def surpluses(self) -> np.ndarray:
        return self.losses - self.costs

    @property
    def prohibitive_price(self) -> float:
        # losses need not be monotone, so use the largest one
        return float(self.losses.max()) + 1.0

    def __repr__(self):
        return f"MarketModel(losses={self.losses.tolist()}, costs={self.costs.tolist()})"


def validate_model(losses: Sequence[float], costs: Sequence[float], n: Optional[int] = None) -> MarketModel:
    """Check raw parameters and return a :class:`MarketModel`.

    Raises
    ------
    LengthMismatch, NonIncreasingCosts, NonPositiveSurplus
        Each carries the offending 1-based ``index``.
    """
    losses = np.asarray(losses, dtype=float).ravel()
    costs = np.asarray(costs, dtype=float).ravel()
    if n is None:
        n = len(losses)
    if n < 1:
        raise ModelError("a model needs at least one type")
    if len(losses) != n:
        raise LengthMismatch(f"expected {n} losses, got {len(losses)}", min(len(losses), n) + 1)
    if len(costs) != n:
        raise LengthMismatch(f"expected {n} costs, got {len(costs)}", min(len(costs), n) + 1)
    if not (np.all(np.isfinite(losses)) and np.all(np.isfinite(costs))):
        raise ModelError("losses and costs must be finite")
    if np.any(costs < 0):
        raise ModelError(f"costs must be nonnegative: {costs.tolist()}")
    for j in range(1, n):
        if not costs[j] > costs[j - 1]:
            raise NonIncreasingCosts(
                f"c_{j + 1} = {costs[j]} does not exceed c_{j} = {costs[j - 1]}", j + 1
            )
    for j in range(n):
        if not losses[j] - costs[j] > 0:
            raise NonPositiveSurplus(
                f"surplus s_{j + 1} = {losses[j] - costs[j]} is not positive", j + 1
            )
    return MarketModel(_frozen(losses), _frozen(costs))


class Belief:
    """A point of the probability simplex over problem types."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        w = np.array(weights, dtype=float).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise InvalidBelief("belief weights must be finite and nonempty")
        if w.min() < -EPS_NUM:
            raise InvalidBelief(f"negative belief weight {w.min()}")
        w[w < 0] = 0.0
        total = w.sum()
        if abs(total - 1.0) > _NORMALIZE_TOL:
            raise InvalidBelief(f"belief weights sum to {total}, not 1")
        w = w / total
        w.setflags(write=False)
        self.weights = w

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def is_interior(self) -> bool:
        return bool(np.all(self.weights > 0))

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def __len__(self):
        return self.weights.size

    def __repr__(self):
        return f"Belief({self.weights.tolist()})"

    @classmethod
    def vertex(cls, n: int, j: int) -> "Belief":
        """Degenerate belief ``e^j`` (1-based ``j``)."""
        w = np.zeros(n)
        w[j - 1] = 1.0
        return cls(w)


def as_belief(x, n: Optional[int] = None) -> Belief:
    b = x if isinstance(x, Belief) else Belief(x)
    if n is not None and b.n != n:
        raise InvalidBelief(f"belief has {b.n} weights, model has {n} types")
    return b


@dataclass(frozen=True, eq=False)
class Splitting:
    """Weighted posteriors.  ``posteriors[k]`` is the k-th posterior (row)."""

    weights: np.ndarray
    posteriors: np.ndarray

    def __post_init__(self):
        if self.weights.ndim != 1 or self.posteriors.ndim != 2:
            raise ModelError("splitting needs a weight vector and a posterior matrix")
        if len(self.weights) != len(self.posteriors):
            raise ModelError("one weight per posterior is required")

    @classmethod
    def build(cls, weights, posteriors) -> "Splitting":
        """Validate weights (positive, summing to one) and posteriors."""
        w = np.array(weights, dtype=float).ravel()
        if w.size == 0 or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ModelError("splitting weights must be positive and finite")
        if abs(w.sum() - 1.0) > _NORMALIZE_TOL:
            raise ModelError(f"splitting weights sum to {w.sum()}, not 1")
        w = w / w.sum()
        post = np.array([as_belief(p).weights for p in posteriors], dtype=float)
        return cls(_frozen(w), _frozen(post))

    @classmethod
    def singleton(cls, prior) -> "Splitting":
        return cls.build([1.0], [as_belief(prior).weights])

    @property
    def k(self) -> int:
        return len(self.weights)

    def mean(self) -> np.ndarray:
        return self.weights @ self.posteriors

    def plausibility_error(self, prior) -> float:
        """Largest coordinate gap between the weighted mean and ``prior``."""
        return float(np.max(np.abs(self.mean() - np.asarray(prior, dtype=float))))

    def check_plausible(self, prior, tol: float = _PLAUSIBLE_TOL) -> "Splitting":
        err = self.plausibility_error(prior)
        if err > tol or abs(self.weights.sum() - 1.0) > _SUM_TOL * 10:
            raise BayesPlausibilityError(f"splitting mean misses the prior by {err:.3e}")
        return self

    def __iter__(self):
        return iter(zip(self.weights, self.posteriors))

    def __repr__(self):
        body = ", ".join(f"{w:.6g}: {p.tolist()}" for w, p in self)
        return f"Splitting({{{body}}})"


class PriceList:
    """One nonnegative finite price per treatment."""

    __slots__ = ("prices",)

    def __init__(self, prices):
        p = np.array(prices, dtype=float).ravel()
        if p.size == 0 or not np.all(np.isfinite(p)) or np.any(p < 0):
            raise InvalidPriceList(f"prices must be nonnegative and finite: {p.tolist()}")
        p.setflags(write=False)
        self.prices = p

    def __array__(self, dtype=None, copy=None):
        return self.prices if dtype is None else self.prices.astype(dtype)

    def __len__(self):
        return self.prices.size

    def __getitem__(self, j):
        return self.prices[j]

    def __eq__(self, other):
        return isinstance(other, PriceList) and np.array_equal(self.prices, other.prices)

    def __hash__(self):
        return hash(self.prices.tobytes())

    def __repr__(self):
        return f"PriceList({self.prices.tolist()})"


def as_prices(x) -> PriceList:
    return x if isinstance(x, PriceList) else PriceList(x)


def reduce_support(model: MarketModel, prior):
    """Drop zero-probability types and their matching treatments.

    Returns ``(reduced_model, reduced_prior, index_map)`` where ``index_map[r]``
    is the 1-based original index of reduced type ``r + 1``.
    """
    prior = as_belief(prior, model.n)
    keep = prior.support
    if keep.size == 0:
        raise EmptySupport("prior has no positive weight")
    index_map = tuple(int(i) + 1 for i in keep)
    if keep.size == model.n:
        return model, prior, index_map
    reduced = MarketModel(_frozen(model.losses[keep]), _frozen(model.costs[keep]))
    return reduced, Belief(prior.weights[keep]), index_map


def embed(weights, index_map, n: int) -> np.ndarray:
    """Lift reduced-model weights back to the original ``n`` coordinates."""
    out = np.zeros(n)
    out[np.asarray(index_map) - 1] = weights
    return out


def load_model(path):
    """Read a model document (TOML or JSON).  Returns ``(model, prior or None)``."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        doc = json.loads(text)
    else:
        doc = tomllib.loads(text)
    return model_from_dict(doc)


def model_from_dict(doc):
    try:
        losses, costs = doc["losses"], doc["costs"]
    except KeyError as exc:
        raise ModelError(f"model document is missing key {exc.args[0]!r}") from None
    model = validate_model(losses, costs)
    prior = doc.get("prior")
    return model, (as_belief(prior, model.n) if prior is not None else None)
