"""Single-ratio optimization over the polytope and payoff-table assembly.

A linear-fractional objective over a bounded polytope is optimized exactly by
the Charnes-Cooper substitution y = t*x, t > 0 with t normalizing the
denominator to one, which turns the ratio program into one LP.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import (
    AffineForm,
    DBLProblem,
    FractionalFunction,
    GoalId,
    LinearConstraint,
    ModelError,
    Relation,
    Sense,
    evaluate,
    goal_label,
)
from .simplex import LinearProgram, LpStatus, solve_lp

T_TOL = 1e-9
VALUE_CHECK_TOL = 1e-7


class FeasibleSetError(ModelError):
    """Feasible set empty or unbounded where boundedness is required."""


class DegeneracyError(ModelError):
    """Charnes-Cooper scale variable collapsed to zero (asymptotic optimum)."""


@dataclass(frozen=True)
class PayoffRow:
    goal_id: GoalId
    label: str
    sense: Sense
    min_value: float
    max_value: float
    argmin: tuple[float, ...]
    argmax: tuple[float, ...]
    multiple_min: bool = False
    multiple_max: bool = False


@dataclass(frozen=True)
class PayoffTable:
    rows: tuple[PayoffRow, ...]

    def row(self, goal_id: GoalId) -> PayoffRow:
        for r in self.rows:
            if r.goal_id == goal_id:
                return r
        raise KeyError(goal_id)


def check_bounded(constraints: tuple[LinearConstraint, ...], n_vars: int) -> tuple[float, ...]:
    """Probe each coordinate's maximum over the polytope; error if unbounded."""
    ubs = []
    for j in range(n_vars):
        obj = AffineForm(tuple(1.0 if k == j else 0.0 for k in range(n_vars)))
        sol = solve_lp(LinearProgram(Sense.MAX, obj, constraints))
        if sol.status is LpStatus.UNBOUNDED:
            raise FeasibleSetError(f"variable {j} is unbounded over the feasible set")
        if sol.status is LpStatus.INFEASIBLE:
            raise FeasibleSetError("feasible set is empty")
        ubs.append(sol.objective_value)
    return tuple(ubs)


def optimize_fractional(
    f: FractionalFunction,
    constraints: tuple[LinearConstraint, ...],
    sense: Sense,
) -> tuple[tuple[float, ...], float, bool]:
    """Optimize one ratio over the polytope.

    Returns (argpoint, value, multiple_optima). The argpoint is whichever
    optimal vertex the deterministic simplex lands on.
    """
    n = f.dim
    # variables (y_0..y_{n-1}, t)
    rows = [
        LinearConstraint(tuple(c.coeffs) + (-c.rhs,), c.relation, 0.0)
        for c in constraints
    ]
    rows.append(
        LinearConstraint(tuple(f.denominator.coeffs) + (f.denominator.constant,), Relation.EQ, 1.0)
    )
    obj = AffineForm(tuple(f.numerator.coeffs) + (f.numerator.constant,))
    sol = solve_lp(LinearProgram(sense, obj, tuple(rows)))
    if sol.status is LpStatus.INFEASIBLE:
        raise FeasibleSetError("feasible set is empty")
    if sol.status is LpStatus.UNBOUNDED:
        raise FeasibleSetError("ratio program unbounded; feasible set is not compact")
    t = sol.x[n]
    if t <= T_TOL:
        raise DegeneracyError(
            "normalization variable collapsed to zero; denominator direction unbounded"
        )
    x = tuple(v / t for v in sol.x[:n])
    value = sol.objective_value
    if abs(evaluate(f, x) - value) > VALUE_CHECK_TOL * max(1.0, abs(value)):
        raise DegeneracyError("recovered point does not reproduce the optimal ratio")
    return x, value, sol.multiple_optima


def payoff_table(problem: DBLProblem) -> PayoffTable:
    """Individual minimum and maximum of every objective over the polytope."""
    n = problem.n_vars
    check_bounded(problem.constraints, n)
    rows = []
    for goal_id, obj in problem.iter_objectives():
        label = goal_label(goal_id)
        try:
            xmin, vmin, mmin = optimize_fractional(obj.func, problem.constraints, Sense.MIN)
            xmax, vmax, mmax = optimize_fractional(obj.func, problem.constraints, Sense.MAX)
        except ModelError as exc:
            raise type(exc)(f"objective {label}: {exc}") from exc
        if vmin > vmax + 1e-9:
            raise ModelError(f"objective {label}: minimum exceeds maximum")
        rows.append(
            PayoffRow(goal_id, label, obj.sense, vmin, vmax, xmin, xmax, mmin, mmax)
        )
    return PayoffTable(tuple(rows))
