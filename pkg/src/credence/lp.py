"""Dense simplex-method feasibility kernel.

Phase one of the textbook tableau method with Bland's rule.  Systems are tiny
(at most a few dozen variables), so a dense tableau is the right tool; the
kernel is compiled with numba because the envelope computation calls it tens
of times per query.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import SolverFailure

LP_TOL = 1e-10
# Fallback pivot rule: entries below this fraction of the column's largest
# entry are skipped.  On degenerate rows such entries are round-off and
# pivoting on them blows the tableau up.
PIVOT_REL = 1e-7
RESIDUAL_TOL = LP_TOL

FEASIBLE = 0
INFEASIBLE = 1
PIVOT_LIMIT = 2


@njit(cache=True)
def _phase_one(A_eq, b_eq, A_ub, b_ub, tol, rel):
    """Find ``x >= 0`` with ``A_eq x = b_eq`` and ``A_ub x <= b_ub``.

    ``rel > 0`` switches on the guarded ratio test (relative pivot floor,
    negative right-hand sides read as zero).  Returns ``(status, x, shaky)``
    where ``shaky`` flags a pivot below the ``PIVOT_REL`` floor.

    Returns ``(status, x)``.  Slack columns serve as the starting basis for
    inequality rows with nonnegative right-hand side; every other row gets an
    artificial column.
    """
    m_eq, n = A_eq.shape
    m_ub = A_ub.shape[0]
    m = m_eq + m_ub
    n_art = m_eq
    for i in range(m_ub):
        if b_ub[i] < 0.0:
            n_art += 1
    n_cols = n + m_ub + n_art
    T = np.zeros((m + 1, n_cols + 1))
    basis = np.empty(m, dtype=np.int64)
    is_art = np.zeros(n_cols + 1, dtype=np.bool_)

    art = n + m_ub
    for i in range(m_eq):
        s = 1.0 if b_eq[i] >= 0.0 else -1.0
        for j in range(n):
            T[i, j] = s * A_eq[i, j]
        T[i, n_cols] = s * b_eq[i]
        T[i, art] = 1.0
        is_art[art] = True
        basis[i] = art
        art += 1
    for r in range(m_ub):
        i = m_eq + r
        s = 1.0 if b_ub[r] >= 0.0 else -1.0
        for j in range(n):
            T[i, j] = s * A_ub[r, j]
        T[i, n + r] = s
        T[i, n_cols] = s * b_ub[r]
        if s > 0.0:
            basis[i] = n + r
        else:
            T[i, art] = 1.0
            is_art[art] = True
            basis[i] = art
            art += 1

    # objective row: reduced costs of "minimize the sum of artificials"
    for i in range(m):
        if is_art[basis[i]]:
            for j in range(n_cols + 1):
                if not is_art[j]:
                    T[m, j] -= T[i, j]

    scale = 1.0
    for i in range(m):
        scale += abs(T[i, n_cols])

    max_pivots = 10 * (m + n_cols) * (m + n_cols)
    pivots = 0
    shaky = False
    while True:
        enter = -1
        for j in range(n_cols):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            break
        col_max = 0.0
        for i in range(m):
            col_max = max(col_max, abs(T[i, enter]))
        piv_tol = max(tol, rel * col_max)
        leave = -1
        best = np.inf
        for i in range(m):
            a = T[i, enter]
            if a > piv_tol:
                ratio = (max(T[i, n_cols], 0.0) if rel > 0.0 else T[i, n_cols]) / a
                if ratio < best - tol:
                    best = ratio
                    leave = i
                elif ratio <= best + tol and basis[i] < basis[leave]:
                    best = min(best, ratio)
                    leave = i
        if leave < 0:
            # unbounded direction cannot occur in phase one; treat as stalled
            break
        piv = T[leave, enter]
        if piv < PIVOT_REL * col_max:
            shaky = True
        for j in range(n_cols + 1):
            T[leave, j] /= piv
        for i in range(m + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for j in range(n_cols + 1):
                        T[i, j] -= f * T[leave, j]
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            return PIVOT_LIMIT, np.zeros(n), shaky

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = max(T[i, n_cols], 0.0)
    infeas = -T[m, n_cols]
    if infeas <= tol * scale:
        return FEASIBLE, x, shaky
    return INFEASIBLE, x, shaky


def find_feasible(A_eq=None, b_eq=None, A_ub=None, b_ub=None, n=None, tol=LP_TOL):
    """Python entry point: feasible ``x`` or ``None``; raises on pivot overflow."""
    if n is None:
        n = (A_eq if A_eq is not None else A_ub).shape[1]
    A_eq = np.zeros((0, n)) if A_eq is None else np.ascontiguousarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.ascontiguousarray(b_eq, dtype=float)
    A_ub = np.zeros((0, n)) if A_ub is None else np.ascontiguousarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.ascontiguousarray(b_ub, dtype=float)
    status, x = _solve(A_eq, b_eq, A_ub, b_ub, tol)
    if status == PIVOT_LIMIT:
        raise SolverFailure("simplex pivot limit exceeded")
    return x if status == FEASIBLE else None


# -- securability system -------------------------------------------------------
#
# Variables z[i, k] (branch i, type k), flattened as i * N + k.  Branch i
# collects the posterior mass that buys treatment i:
#     sum_i z[i, :] = prior
#     sum_k (c_i + v - g_ik) z[i, k] <= 0,   g_ik = l_k if k <= i else 0
# The branch weight is sum_k z[i, k] and its posterior z[i] / weight.


@njit(cache=True)
def _residual_ok(A_eq, b_eq, A_ub, b_ub, x, tol):
    scale = 1.0
    for i in range(b_eq.shape[0]):
        scale += abs(b_eq[i])
    bound = tol * scale
    for i in range(A_eq.shape[0]):
        if abs(A_eq[i] @ x - b_eq[i]) > bound:
            return False
    for i in range(A_ub.shape[0]):
        if A_ub[i] @ x - b_ub[i] > bound:
            return False
    return True


@njit(cache=True)
def _solve(A_eq, b_eq, A_ub, b_ub, tol):
    """Textbook pivoting first.  An infeasible verdict reached through a
    round-off pivot is rechecked with the guarded rule and overturned only by
    a point that checks out against the raw system."""
    status, x, shaky = _phase_one(A_eq, b_eq, A_ub, b_ub, tol, 0.0)
    if status != INFEASIBLE or not shaky:
        return status, x
    status2, x2, _ = _phase_one(A_eq, b_eq, A_ub, b_ub, tol, PIVOT_REL)
    if status2 == FEASIBLE and _residual_ok(A_eq, b_eq, A_ub, b_ub, x2, RESIDUAL_TOL):
        return FEASIBLE, x2
    return status, x


@njit(cache=True)
def _level_system(losses, costs, prior, v):
    n = losses.shape[0]
    A_eq = np.zeros((n, n * n))
    A_ub = np.zeros((n, n * n))
    for i in range(n):
        for k in range(n):
            A_eq[k, i * n + k] = 1.0
            g = losses[k] if k <= i else 0.0
            A_ub[i, i * n + k] = costs[i] + v - g
    return A_eq, prior.copy(), A_ub, np.zeros(n)


@njit(cache=True)
def level_feasible(losses, costs, prior, v, tol):
    # Strict pivoting only.  Level constraints scale with branch mass, so a
    # near-empty branch passes any residual check at a level it misses; the
    # guarded fallback would let the bisection overshoot.
    A_eq, b_eq, A_ub, b_ub = _level_system(losses, costs, prior, v)
    status, z, _ = _phase_one(A_eq, b_eq, A_ub, b_ub, tol, 0.0)
    return status, z


@njit(cache=True)
def bisect_level(losses, costs, prior, lo, hi, eps, tol):
    """Largest securable level in ``[lo, hi]`` to within ``eps``.

    ``lo`` must be securable.  Returns ``(status, level)``; a nonzero status
    is the pivot-limit code.
    """
    status, _ = level_feasible(losses, costs, prior, hi, tol)
    if status == PIVOT_LIMIT:
        return status, lo
    if status == FEASIBLE:
        return FEASIBLE, hi
    while hi - lo > eps:
        mid = 0.5 * (lo + hi)
        status, _ = level_feasible(losses, costs, prior, mid, tol)
        if status == PIVOT_LIMIT:
            return status, lo
        if status == FEASIBLE:
            lo = mid
        else:
            hi = mid
    return FEASIBLE, lo
