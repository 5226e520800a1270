"""Fuzzy goals and their membership functions.

Each objective gets a goal: an ideal value where satisfaction is full, a
tolerance limit where it reaches zero, and a positive weight. Membership is
the linear interpolation between the two, clamped to [0, 1] when reported.
The unclamped rational form is what downstream linearization works on.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .model import (
    ABS_TOL,
    AffineForm,
    FractionalFunction,
    GoalId,
    ModelError,
    Sense,
)
from .fractional import PayoffTable


class Direction(str, Enum):
    #: fuzzified "at most the ideal" (minimization objectives)
    LESS = "less"
    #: fuzzified "at least the ideal" (maximization objectives)
    GREATER = "greater"


class DegenerateGoalError(ModelError):
    """Tolerance limit coincides with the ideal; membership slope undefined."""


class GoalAspirationWarning(UserWarning):
    """A chosen ideal lies beyond what the feasible set can achieve."""


@dataclass(frozen=True)
class FuzzyGoal:
    goal_id: GoalId
    label: str
    direction: Direction
    ideal: float
    tolerance_limit: float
    weight: float

    def __post_init__(self):
        if not (math.isfinite(self.ideal) and math.isfinite(self.tolerance_limit)):
            raise DegenerateGoalError(f"goal {self.label}: non-finite parameters")
        if abs(self.tolerance_limit - self.ideal) <= ABS_TOL:
            raise DegenerateGoalError(
                f"goal {self.label}: tolerance limit equals ideal ({self.ideal!r})"
            )
        if self.direction is Direction.LESS and self.tolerance_limit < self.ideal:
            raise DegenerateGoalError(
                f"goal {self.label}: tolerance limit must exceed the ideal"
            )
        if self.direction is Direction.GREATER and self.tolerance_limit > self.ideal:
            raise DegenerateGoalError(
                f"goal {self.label}: tolerance limit must lie below the ideal"
            )
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise DegenerateGoalError(f"goal {self.label}: weight must be positive")

    @property
    def span(self) -> float:
        return abs(self.tolerance_limit - self.ideal)


def reciprocal_weight(ideal: float, tolerance_limit: float) -> float:
    span = abs(tolerance_limit - ideal)
    if span <= ABS_TOL:
        raise DegenerateGoalError("tolerance limit equals ideal")
    return 1.0 / span


def default_goals(payoff: PayoffTable) -> tuple[FuzzyGoal, ...]:
    """One goal per objective from the payoff extremes, weight = 1/span."""
    goals = []
    for row in payoff.rows:
        if row.sense is Sense.MIN:
            direction, ideal, tol = Direction.LESS, row.min_value, row.max_value
        else:
            direction, ideal, tol = Direction.GREATER, row.max_value, row.min_value
        label = "mu" + row.label[1:]
        if abs(tol - ideal) <= ABS_TOL:
            raise DegenerateGoalError(
                f"goal {label}: objective {row.label} is constant over the feasible set"
            )
        goals.append(
            FuzzyGoal(row.goal_id, label, direction, ideal, tol, reciprocal_weight(ideal, tol))
        )
    return tuple(goals)


@dataclass(frozen=True)
class GoalOverride:
    ideal: Optional[float] = None
    tolerance_limit: Optional[float] = None
    weight: Optional[float] = None


def apply_overrides(
    goals: tuple[FuzzyGoal, ...],
    overrides: dict[GoalId, GoalOverride],
    payoff: Optional[PayoffTable] = None,
) -> tuple[FuzzyGoal, ...]:
    """Replace goal parameters with decision-maker choices.

    Weight defaults back to 1/span whenever ideal or tolerance change without
    an explicit weight. Ideals beyond the achievable extreme only warn.
    """
    out = []
    for goal in goals:
        ov = overrides.get(goal.goal_id)
        if ov is None:
            out.append(goal)
            continue
        ideal = goal.ideal if ov.ideal is None else ov.ideal
        tol = goal.tolerance_limit if ov.tolerance_limit is None else ov.tolerance_limit
        if ov.weight is not None:
            weight = ov.weight
        elif ov.ideal is not None or ov.tolerance_limit is not None:
            weight = reciprocal_weight(ideal, tol)
        else:
            weight = goal.weight
        out.append(replace(goal, ideal=ideal, tolerance_limit=tol, weight=weight))
        if payoff is not None:
            row = payoff.row(goal.goal_id)
            beyond = (
                ideal < row.min_value - ABS_TOL
                if goal.direction is Direction.LESS
                else ideal > row.max_value + ABS_TOL
            )
            if beyond:
                warnings.warn(
                    f"goal {goal.label}: ideal {ideal!r} lies beyond the achievable "
                    f"extreme {row.min_value if goal.direction is Direction.LESS else row.max_value!r}",
                    GoalAspirationWarning,
                    stacklevel=2,
                )
    return tuple(out)


def membership_value(goal: FuzzyGoal, fval: float) -> float:
    """Satisfaction degree in [0, 1] for an objective value."""
    if goal.direction is Direction.LESS:
        raw = (goal.tolerance_limit - fval) / (goal.tolerance_limit - goal.ideal)
    else:
        raw = (fval - goal.tolerance_limit) / (goal.ideal - goal.tolerance_limit)
    return min(1.0, max(0.0, raw))


def membership_expression(goal: FuzzyGoal, f: FractionalFunction) -> FractionalFunction:
    """Unclamped membership as a single ratio sharing f's denominator.

    For a less-type goal: (tol - f(x)) / (tol - ideal) with f = N/D becomes
    (tol*D - N) / ((tol - ideal) * D), returned over the original D. Values
    above 1 or below 0 are meaningful here; only reporting clamps.
    """
    num, den = f.numerator, f.denominator
    if goal.direction is Direction.LESS:
        scale = 1.0 / (goal.tolerance_limit - goal.ideal)
        coeffs = tuple(
            scale * (goal.tolerance_limit * d - c) for c, d in zip(num.coeffs, den.coeffs)
        )
        const = scale * (goal.tolerance_limit * den.constant - num.constant)
    else:
        scale = 1.0 / (goal.ideal - goal.tolerance_limit)
        coeffs = tuple(
            scale * (c - goal.tolerance_limit * d) for c, d in zip(num.coeffs, den.coeffs)
        )
        const = scale * (num.constant - goal.tolerance_limit * den.constant)
    return FractionalFunction(AffineForm(coeffs, const), den)
