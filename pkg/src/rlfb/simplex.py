"""Dense two-phase simplex for small linear programs.

Minimizes c @ x subject to A_eq x = b_eq, A_ub x <= b_ub, x >= 0. Bland's
rule (lowest-index entering column, lowest-index tie break on the ratio
test) makes the pivot sequence deterministic and cycle-free. Sized for
problems with tens of variables and a handful of rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LpInfeasible", "LpUnbounded", "LpResult", "solve_lp"]

PIVOT_TOL = 1e-11
_MAX_PIVOTS = 10_000


class LpInfeasible(Exception):
    """The constraint set has no nonnegative solution."""


class LpUnbounded(Exception):
    """The objective decreases without bound over the feasible set."""


@dataclass(frozen=True)
class LpResult:
    x: np.ndarray
    objective: float


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _run_simplex(tableau: np.ndarray, basis: list[int], ncols: int) -> None:
    # Objective row is tableau[-1]; reduced costs in columns [0, ncols).
    for _ in range(_MAX_PIVOTS):
        enter = -1
        for j in range(ncols):
            if tableau[-1, j] < -PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return
        leave = -1
        best_ratio = np.inf
        for i in range(len(basis)):
            coef = tableau[i, enter]
            if coef > PIVOT_TOL:
                ratio = tableau[i, -1] / coef
                if ratio < best_ratio - PIVOT_TOL or (
                    abs(ratio - best_ratio) <= PIVOT_TOL
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise LpUnbounded("no blocking row for entering column %d" % enter)
        _pivot(tableau, leave, enter)
        basis[leave] = enter
    raise RuntimeError("simplex failed to converge within the pivot cap")


def solve_lp(
    c: np.ndarray,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    a_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
) -> LpResult:
    """Minimize c @ x subject to a_eq x = b_eq, a_ub x <= b_ub, x >= 0."""
    c = np.asarray(c, dtype=float)
    n = c.size
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    n_ub = 0
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        n_ub = a_ub.shape[0]
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        for i in range(a_eq.shape[0]):
            rows.append(np.concatenate([a_eq[i], np.zeros(n_ub)]))
            rhs.append(float(b_eq[i]))
    if a_ub is not None:
        for i in range(n_ub):
            slack = np.zeros(n_ub)
            slack[i] = 1.0
            rows.append(np.concatenate([a_ub[i], slack]))
            rhs.append(float(b_ub[i]))

    m = len(rows)
    n_total = n + n_ub
    if m == 0:
        if np.any(c < -PIVOT_TOL):
            raise LpUnbounded("unconstrained negative cost direction")
        return LpResult(x=np.zeros(n), objective=0.0)

    a = np.vstack(rows)
    b = np.asarray(rhs, dtype=float)
    flip = b < 0.0
    a[flip] *= -1.0
    b[flip] *= -1.0

    # Phase 1: artificial basis, minimize the artificials' sum.
    tableau = np.zeros((m + 1, n_total + m + 1))
    tableau[:m, :n_total] = a
    tableau[:m, n_total : n_total + m] = np.eye(m)
    tableau[:m, -1] = b
    basis = list(range(n_total, n_total + m))
    tableau[-1, :n_total] = -a.sum(axis=0)
    tableau[-1, -1] = -b.sum()
    _run_simplex(tableau, basis, n_total)
    if tableau[-1, -1] < -1e-9:
        raise LpInfeasible(f"phase-1 residual {-tableau[-1, -1]:.3e}")

    # Drive leftover artificials out of the basis; drop redundant rows.
    keep = list(range(m))
    for i in range(m):
        if basis[i] >= n_total:
            for j in range(n_total):
                if abs(tableau[i, j]) > PIVOT_TOL:
                    _pivot(tableau, i, j)
                    basis[i] = j
                    break
            else:
                keep.remove(i)
    if len(keep) < m:
        tableau = np.vstack([tableau[keep], tableau[-1:]])
        basis = [basis[i] for i in keep]
        m = len(keep)

    # Phase 2: real objective expressed over the current basis.
    cost = np.concatenate([c, np.zeros(n_ub + (tableau.shape[1] - 1 - n_total))])
    obj = cost.copy()
    rhs_val = 0.0
    for i, bi in enumerate(basis):
        obj -= cost[bi] * tableau[i, :-1]
        rhs_val -= cost[bi] * tableau[i, -1]
    tableau[-1, :-1] = obj
    tableau[-1, -1] = rhs_val
    # Entering columns are scanned only in [0, n_total), so artificials
    # cannot re-enter the basis here.
    _run_simplex(tableau, basis, n_total)

    x = np.zeros(n_total)
    for i, bi in enumerate(basis):
        if bi < n_total:
            x[bi] = tableau[i, -1]
    return LpResult(x=x[:n], objective=float(c @ x[:n]))
