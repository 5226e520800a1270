"""Deterministic two-phase simplex solver.

Dense tableau implementation with Bland's rule for both the entering and the
leaving choice, so identical inputs always take the identical pivot path and
no basis can repeat. Equality and >= rows get artificial variables in phase 1;
no big-M. Intended for the small LPs this package generates, not for scale.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .model import AffineForm, LinearConstraint, Relation, Sense

RC_TOL = 1e-9  # reduced-cost optimality tolerance
FEAS_TOL = 1e-7
PIVOT_TOL = 1e-10
RATIO_TIE_TOL = 1e-9
DEFAULT_PIVOT_CAP = 10_000


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class SimplexError(RuntimeError):
    """Numerical failure (pivot cap exceeded or a post-solve check failed)."""


@dataclass(frozen=True)
class LinearProgram:
    """min/max of an affine objective over linear constraints and x >= lb.

    lower_bounds defaults to all zeros. fixed pins chosen variables to exact
    values; they are substituted out before the tableau is built and restored
    verbatim in the solution.
    """

    sense: Sense
    objective: AffineForm
    constraints: tuple[LinearConstraint, ...]
    lower_bounds: Optional[tuple[float, ...]] = None
    fixed: Optional[dict[int, float]] = None


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: tuple[float, ...]
    objective_value: float
    pivot_count: int
    #: a nonbasic column had zero reduced cost at optimality, so the optimal
    #: vertex need not be unique
    multiple_optima: bool = False


def _check_dims(lp: LinearProgram) -> int:
    n = lp.objective.dim
    for i, con in enumerate(lp.constraints, start=1):
        if len(con.coeffs) != n:
            raise ValueError(f"constraint {i}: expected {n} coefficients, got {len(con.coeffs)}")
    if lp.lower_bounds is not None and len(lp.lower_bounds) != n:
        raise ValueError("lower_bounds length does not match objective dimension")
    if lp.fixed:
        lb = lp.lower_bounds or (0.0,) * n
        for idx, val in lp.fixed.items():
            if idx < 0 or idx >= n:
                raise ValueError(f"fixed variable index {idx} out of range")
            if val < lb[idx] - FEAS_TOL:
                raise ValueError(f"fixed value {val} below lower bound for variable {idx}")
    return n


class _Tableau:
    def __init__(self, rows: np.ndarray, rhs: np.ndarray, basis: list[int]):
        self.rows = rows  # m x ncols
        self.rhs = rhs  # m
        self.basis = basis
        self.pivots = 0

    def reduced_costs(self, cost: np.ndarray) -> tuple[np.ndarray, float]:
        # r = c - c_B B^-1 A over the current (already eliminated) tableau
        r = cost.copy()
        val = 0.0
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb != 0.0:
                r -= cb * self.rows[i]
                val += cb * self.rhs[i]
        return r, val

    def pivot(self, row: int, col: int) -> None:
        piv = self.rows[row, col]
        self.rows[row] /= piv
        self.rhs[row] /= piv
        for i in range(self.rows.shape[0]):
            if i == row:
                continue
            factor = self.rows[i, col]
            if abs(factor) > PIVOT_TOL:
                self.rows[i] -= factor * self.rows[row]
                self.rhs[i] -= factor * self.rhs[row]
        self.basis[row] = col
        self.pivots += 1


def _iterate(tab: _Tableau, cost: np.ndarray, allowed: int, pivot_cap: int,
             trace: Optional[list] = None) -> str:
    """Run Bland-rule simplex to optimality on minimization cost.

    allowed = number of leading columns eligible to enter (excludes artificials
    in phase 2). Returns 'optimal' or 'unbounded'.
    """
    while True:
        r, _ = tab.reduced_costs(cost)
        enter = -1
        for j in range(allowed):
            if j not in tab.basis and r[j] < -RC_TOL:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = np.inf
        for i in range(tab.rows.shape[0]):
            a = tab.rows[i, enter]
            if a > PIVOT_TOL:
                ratio = tab.rhs[i] / a
                if ratio < best - RATIO_TIE_TOL or (
                    abs(ratio - best) <= RATIO_TIE_TOL
                    and (leave < 0 or tab.basis[i] < tab.basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        if tab.pivots >= pivot_cap:
            raise SimplexError(f"pivot cap {pivot_cap} exceeded; numerical stall suspected")
        tab.pivot(leave, enter)
        if trace is not None:
            trace.append(tuple(sorted(tab.basis)))


def solve_lp(lp: LinearProgram, pivot_cap: int = DEFAULT_PIVOT_CAP,
             trace: Optional[list] = None) -> LpSolution:
    """Solve an LP deterministically; see LpStatus for the non-fault outcomes."""
    n = _check_dims(lp)
    lb = np.array(lp.lower_bounds if lp.lower_bounds is not None else (0.0,) * n)
    fixed = dict(lp.fixed or {})
    free_idx = [j for j in range(n) if j not in fixed]

    # substitute fixed values and shift lower bounds to zero
    point = np.array([fixed.get(j, lb[j]) for j in range(n)])
    if not free_idx:
        ok = all(c.satisfied(point, FEAS_TOL) for c in lp.constraints)
        value = lp.objective.value(point)
        status = LpStatus.OPTIMAL if ok else LpStatus.INFEASIBLE
        return LpSolution(status, tuple(point), value if ok else float("nan"), 0)

    a_full = np.array([c.coeffs for c in lp.constraints], dtype=float) if lp.constraints else np.zeros((0, n))
    rel = [c.relation for c in lp.constraints]
    rhs = np.array([c.rhs for c in lp.constraints], dtype=float) - a_full @ point
    a = a_full[:, free_idx] if len(lp.constraints) else np.zeros((0, len(free_idx)))

    m = len(rhs)
    nf = len(free_idx)

    # normalize to nonnegative rhs, then add slack/surplus/artificial columns
    rows = []
    rels = []
    for i in range(m):
        row, r, b = a[i].copy(), rel[i], rhs[i]
        if b < 0:
            row, b = -row, -b
            r = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}[r]
        rows.append((row, b))
        rels.append(r)

    n_slack = sum(1 for r in rels if r is not Relation.EQ)
    n_art = sum(1 for r in rels if r is not Relation.LE)
    ncols = nf + n_slack + n_art
    art_start = nf + n_slack

    tab_rows = np.zeros((m, ncols))
    tab_rhs = np.zeros(m)
    basis: list[int] = [0] * m
    si = ai = 0
    for i, (row, b) in enumerate(rows):
        tab_rows[i, :nf] = row
        tab_rhs[i] = b
        r = rels[i]
        if r is Relation.LE:
            tab_rows[i, nf + si] = 1.0
            basis[i] = nf + si
            si += 1
        elif r is Relation.GE:
            tab_rows[i, nf + si] = -1.0
            si += 1
            tab_rows[i, art_start + ai] = 1.0
            basis[i] = art_start + ai
            ai += 1
        else:
            tab_rows[i, art_start + ai] = 1.0
            basis[i] = art_start + ai
            ai += 1

    tab = _Tableau(tab_rows, tab_rhs, basis)

    if n_art:
        cost1 = np.zeros(ncols)
        cost1[art_start:] = 1.0
        _iterate(tab, cost1, ncols, pivot_cap, trace)
        _, phase1_val = tab.reduced_costs(cost1)
        if phase1_val > 1e-8:
            return LpSolution(LpStatus.INFEASIBLE, (), float("nan"), tab.pivots)
        # drive any remaining artificials out of the basis
        drop_rows = []
        for i in range(m):
            if tab.basis[i] >= art_start:
                for j in range(art_start):
                    if abs(tab.rows[i, j]) > PIVOT_TOL:
                        tab.pivot(i, j)
                        if trace is not None:
                            trace.append(tuple(sorted(tab.basis)))
                        break
                else:
                    drop_rows.append(i)  # redundant constraint
        if drop_rows:
            keep = [i for i in range(m) if i not in drop_rows]
            tab.rows = tab.rows[keep]
            tab.rhs = tab.rhs[keep]
            tab.basis = [tab.basis[i] for i in keep]

    cost2 = np.zeros(ncols)
    obj = np.array([lp.objective.coeffs[j] for j in free_idx], dtype=float)
    cost2[:nf] = obj if lp.sense is Sense.MIN else -obj
    outcome = _iterate(tab, cost2, art_start, pivot_cap, trace)
    if outcome == "unbounded":
        return LpSolution(LpStatus.UNBOUNDED, (), float("nan"), tab.pivots)

    xf = np.zeros(nf)
    for i, b in enumerate(tab.basis):
        if b < nf:
            xf[b] = tab.rhs[i]
    xf[np.abs(xf) < 1e-12] = 0.0

    x = point.copy()
    for k, j in enumerate(free_idx):
        x[j] += xf[k]

    for i, con in enumerate(lp.constraints, start=1):
        if not con.satisfied(x, 1e-6):
            raise SimplexError(f"solution violates constraint {i} beyond tolerance")

    r, _ = tab.reduced_costs(cost2)
    multiple = any(
        j not in tab.basis and abs(r[j]) <= RC_TOL for j in range(art_start)
    )
    return LpSolution(
        LpStatus.OPTIMAL,
        tuple(float(v) for v in x),
        lp.objective.value(x),
        tab.pivots,
        multiple_optima=multiple,
    )
