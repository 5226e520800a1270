"""Assembly and solution of the weighted goal programs.

Two max-min models share one structure: maximize the achievement level
lambda subject to w_ij * lambda <= linearized membership, one negative
deviational variable per goal tied by lambda + d_ij = 1, and the original
polytope. The upper-level model carries only the leader's goals; the full
model carries every goal and pins the leader's variables to the upper
solution. A normalized weighted-sum model is kept as the alternative
aggregation path.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .model import (
    AffineForm,
    FractionalFunction,
    GoalId,
    LinearConstraint,
    Relation,
    Sense,
    evaluate,
)
from .goals import FuzzyGoal, membership_value
from .simplex import LinearProgram, LpSolution, LpStatus, solve_lp
from .taylor import LinearizedMembership


class ModelKind(str, Enum):
    UPPER_LEVEL = "UpperLevel"
    FULL_HIERARCHY = "FullHierarchy"
    WEIGHTED_SUM = "WeightedSum"


@dataclass(frozen=True)
class GoalConstraint:
    goal_id: GoalId
    affine: AffineForm  # linearized membership in the decision variables
    dev_index: int  # column of d_ij in the assembled LP (-1 for weighted sum)


@dataclass(frozen=True)
class VariableRoles:
    n_decision: int
    lam: int  # -1 when absent
    deviations: dict[GoalId, int]


@dataclass(frozen=True)
class GoalBinding:
    """Everything needed to report on one goal after a solve."""

    goal: FuzzyGoal
    func: FractionalFunction
    lin: LinearizedMembership


@dataclass(frozen=True)
class FgpModel:
    kind: ModelKind
    lp: LinearProgram
    roles: VariableRoles
    goal_constraints: tuple[GoalConstraint, ...]
    bindings: tuple[GoalBinding, ...]
    fixed_vars: Optional[dict[int, float]] = None


@dataclass(frozen=True)
class CandidateSolution:
    x: tuple[float, ...]
    lam: float
    deviations: dict[GoalId, float]
    memberships: dict[GoalId, float]  # clamped, from the true ratios
    objective_values: dict[GoalId, float]


def _pad(coeffs: tuple[float, ...], total: int) -> tuple[float, ...]:
    return coeffs + (0.0,) * (total - len(coeffs))


def _maxmin_model(
    kind: ModelKind,
    bindings: tuple[GoalBinding, ...],
    constraints: tuple[LinearConstraint, ...],
    n_vars: int,
    fixed: Optional[dict[int, float]],
) -> FgpModel:
    k = len(bindings)
    total = n_vars + 1 + k  # decision vars, lambda, one deviation per goal
    lam_col = n_vars
    rows: list[LinearConstraint] = []
    goal_cons: list[GoalConstraint] = []
    for g, b in enumerate(bindings):
        # w * lambda - mu(x) <= mu's constant term
        a = b.lin.affine
        coeffs = [-c for c in a.coeffs] + [0.0] * (1 + k)
        coeffs[lam_col] = b.goal.weight
        rows.append(LinearConstraint(tuple(coeffs), Relation.LE, a.constant))
        goal_cons.append(GoalConstraint(b.goal.goal_id, a, n_vars + 1 + g))
    for g in range(k):
        coeffs = [0.0] * total
        coeffs[lam_col] = 1.0
        coeffs[n_vars + 1 + g] = 1.0
        rows.append(LinearConstraint(tuple(coeffs), Relation.EQ, 1.0))
    for con in constraints:
        rows.append(LinearConstraint(_pad(con.coeffs, total), con.relation, con.rhs))

    objective = AffineForm(tuple(1.0 if j == lam_col else 0.0 for j in range(total)))
    lp = LinearProgram(Sense.MAX, objective, tuple(rows), fixed=dict(fixed) if fixed else None)
    roles = VariableRoles(
        n_decision=n_vars,
        lam=lam_col,
        deviations={b.goal.goal_id: n_vars + 1 + g for g, b in enumerate(bindings)},
    )
    return FgpModel(kind, lp, roles, tuple(goal_cons), bindings, dict(fixed) if fixed else None)


def build_upper_fgp(
    upper_bindings: tuple[GoalBinding, ...],
    constraints: tuple[LinearConstraint, ...],
    n_vars: int,
) -> FgpModel:
    """Leader-only achievement model: max lambda over the leader's goals."""
    return _maxmin_model(ModelKind.UPPER_LEVEL, upper_bindings, constraints, n_vars, None)


def build_full_fgp(
    all_bindings: tuple[GoalBinding, ...],
    constraints: tuple[LinearConstraint, ...],
    n_vars: int,
    x_upper: dict[int, float],
) -> FgpModel:
    """Whole-hierarchy model with the leader's variables pinned to x_upper."""
    return _maxmin_model(ModelKind.FULL_HIERARCHY, all_bindings, constraints, n_vars, x_upper)


def build_weighted_sum(
    bindings: tuple[GoalBinding, ...],
    weights: tuple[float, ...],
    constraints: tuple[LinearConstraint, ...],
    n_vars: int,
) -> FgpModel:
    """Alternative aggregation: max sum of normalized-weighted memberships."""
    if len(weights) != len(bindings):
        raise ValueError("one weight per goal required")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    if abs(sum(weights) - 1.0) > 1e-6:
        raise ValueError(f"weights must sum to 1, got {sum(weights)!r}")
    coeffs = [0.0] * n_vars
    const = 0.0
    rows: list[LinearConstraint] = []
    goal_cons: list[GoalConstraint] = []
    for w, b in zip(weights, bindings):
        a = b.lin.affine
        for j, c in enumerate(a.coeffs):
            coeffs[j] += w * c
        const += w * a.constant
        rows.append(LinearConstraint(a.coeffs, Relation.LE, 1.0 - a.constant))
        goal_cons.append(GoalConstraint(b.goal.goal_id, a, -1))
    rows.extend(constraints)
    lp = LinearProgram(Sense.MAX, AffineForm(tuple(coeffs), const), tuple(rows))
    roles = VariableRoles(n_decision=n_vars, lam=-1, deviations={})
    return FgpModel(ModelKind.WEIGHTED_SUM, lp, roles, tuple(goal_cons), bindings)


def solve_model(model: FgpModel) -> LpSolution:
    return solve_lp(model.lp)


def extract_solution(model: FgpModel, sol: LpSolution) -> CandidateSolution:
    """Project an optimal LP solution back onto the problem's terms."""
    if sol.status is not LpStatus.OPTIMAL:
        raise ValueError(f"no candidate to extract: solver status {sol.status.value}")
    n = model.roles.n_decision
    x = sol.x[:n]
    lam = sol.x[model.roles.lam] if model.roles.lam >= 0 else float("nan")
    deviations = {gid: sol.x[col] for gid, col in model.roles.deviations.items()}
    memberships = {}
    objective_values = {}
    for b in model.bindings:
        fval = evaluate(b.func, x)
        objective_values[b.goal.goal_id] = fval
        memberships[b.goal.goal_id] = membership_value(b.goal, fval)
    return CandidateSolution(x, lam, deviations, memberships, objective_values)
