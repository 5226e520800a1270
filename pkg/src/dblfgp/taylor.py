"""First-order linearization of membership ratios around their maximizer.

The maximizer of a membership function coincides with the individual optimum
of its objective (a monotone affine transform of it), so the expansion point
comes straight from the payoff table when one is available.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .model import (
    AffineForm,
    DENOM_TOL,
    EvaluationError,
    FractionalFunction,
    GoalId,
    LinearConstraint,
    Sense,
    evaluate,
)
from .fractional import PayoffTable, optimize_fractional
from .goals import Direction, FuzzyGoal, membership_expression


@dataclass(frozen=True)
class LinearizedMembership:
    goal_id: GoalId
    label: str
    expansion_point: tuple[float, ...]
    affine: AffineForm
    #: the expansion point came from a non-unique optimal face
    multiple_optima: bool = False


def gradient_fractional(expr: FractionalFunction, x: Sequence[float]) -> tuple[float, ...]:
    """Quotient-rule gradient of N/D at x: (D*grad_N - N*grad_D) / D^2."""
    den = expr.denominator.value(x)
    if den <= DENOM_TOL:
        raise EvaluationError(f"denominator {den:.3e} too small for a gradient at {tuple(x)}")
    num = expr.numerator.value(x)
    return tuple(
        (den * cn - num * cd) / (den * den)
        for cn, cd in zip(expr.numerator.coeffs, expr.denominator.coeffs)
    )


def taylor_linearize(expr: FractionalFunction, point: Sequence[float]) -> AffineForm:
    """value(point) + grad(point) . (x - point), including the zeroth-order term."""
    grad = gradient_fractional(expr, point)
    value = evaluate(expr, point)
    const = value - sum(g * p for g, p in zip(grad, point))
    return AffineForm(grad, const)


def maximizer_point(
    goal: FuzzyGoal,
    f: FractionalFunction,
    constraints: tuple[LinearConstraint, ...],
    payoff: Optional[PayoffTable] = None,
) -> tuple[float, ...]:
    """Point maximizing the goal's membership: the objective's own optimum."""
    if payoff is not None:
        row = payoff.row(goal.goal_id)
        return row.argmin if goal.direction is Direction.LESS else row.argmax
    sense = Sense.MIN if goal.direction is Direction.LESS else Sense.MAX
    x, _, _ = optimize_fractional(f, constraints, sense)
    return x


def linearize_goal(
    goal: FuzzyGoal,
    f: FractionalFunction,
    constraints: tuple[LinearConstraint, ...],
    payoff: Optional[PayoffTable] = None,
) -> LinearizedMembership:
    multiple = False
    if payoff is not None:
        row = payoff.row(goal.goal_id)
        point = row.argmin if goal.direction is Direction.LESS else row.argmax
        multiple = row.multiple_min if goal.direction is Direction.LESS else row.multiple_max
    else:
        sense = Sense.MIN if goal.direction is Direction.LESS else Sense.MAX
        point, _, multiple = optimize_fractional(f, constraints, sense)
    expr = membership_expression(goal, f)
    affine = taylor_linearize(expr, point)
    return LinearizedMembership(goal.goal_id, goal.label, point, affine, multiple)
