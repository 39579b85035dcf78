"""Brute-force cross-checks for the envelope engine.

Nothing here touches :mod:`credence.lp` or :mod:`credence.envelope`: the grid
oracle enumerates beliefs on a simplex lattice and asks an off-the-shelf LP
solver whether the prior lies in the hull of the good ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import linprog

from .errors import SolverFailure
from .model import MarketModel, as_belief
from .profits import hyperplane_profits

HULL_TOL = 1e-9
DEFAULT_MESH = {2: 200, 3: 60, 4: 25}


def default_mesh(n: int) -> int:
    return DEFAULT_MESH.get(n, max(4, 25 - 5 * (n - 4)))


def _compositions(total: int, parts: int):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield out


@dataclass(frozen=True)
class SimplexGrid:
    """Every belief with coordinates in ``{0, 1/m, ..., 1}``."""

    n: int
    m: int
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("grid needs n >= 1 and m >= 1")
        pts = np.array(list(_compositions(self.m, self.n)), dtype=float) / self.m
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def expected_size(self) -> int:
        return comb(self.m + self.n - 1, self.n - 1)

    def __len__(self):
        return len(self.points)


def hull_membership(points, target, tol: float = HULL_TOL):
    """Is ``target`` a convex combination of ``points``?

    Returns ``(feasible, coefficients)`` with ``coefficients`` ``None`` when
    infeasible.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("hull_membership needs at least one point")
    target = np.asarray(target, dtype=float)
    k = len(pts)
    A_eq = np.vstack([pts.T, np.ones((1, k))])
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(
        np.zeros(k),
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": tol},
    )
    if res.status == 2:
        return False, None
    if res.status != 0:
        raise SolverFailure(f"hull membership LP failed: {res.message}")
    coeffs = np.clip(res.x, 0.0, None)
    if np.max(np.abs(A_eq @ coeffs - b_eq)) > 10 * tol:
        return False, None
    return True, coeffs


def grid_tolerance(model: MarketModel, m: int) -> float:
    return float(model.losses.max() * model.n / m)


def qcav_grid_oracle(model: MarketModel, prior, m: int | None = None) -> float:
    """Largest level whose (slackened) upper set on the grid covers the prior."""
    prior = as_belief(prior, model.n).weights
    m = default_mesh(model.n) if m is None else int(m)
    if m < 2:
        raise ValueError("mesh must be at least 2")
    support = np.flatnonzero(prior > 0)
    if support.size == 1:
        # a vertex has only the trivial splitting; slack would overshoot it
        return max(float(hyperplane_profits(model, prior).max()), 0.0)
    grid = SimplexGrid(model.n, m).points
    values = np.maximum(hyperplane_profits(model, grid).max(axis=1), 0.0)
    at_prior = max(float(hyperplane_profits(model, prior).max()), 0.0)
    eps = grid_tolerance(model, m)
    candidates = np.unique(np.append(values, at_prior))

    def covers(v):
        return hull_membership(grid[values >= v - eps], prior)[0]

    # covers() is monotone in v; the prior's own level always passes via the
    # grid points around it, so search for the last passing candidate
    lo, hi = 0, len(candidates) - 1
    if not covers(candidates[lo]):
        raise SolverFailure("lowest candidate level does not cover the prior")
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if covers(candidates[mid]):
            lo = mid
        else:
            hi = mid - 1
    return float(candidates[lo])
