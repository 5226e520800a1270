"""Core types for decentralized bi-level multiobjective linear-fractional programs.

A problem instance pairs a shared polytope of linear constraints with a
two-level hierarchy of decision makers. Each decision maker controls a
disjoint block of the variables and carries one or more linear-fractional
objectives (ratio of two affine forms with a positive denominator).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

ABS_TOL = 1e-9
#: a denominator is only trusted if its minimum over the feasible set stays above this
DENOM_TOL = 1e-9


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class ModelError(ValueError):
    """Base class for problem definition and evaluation failures."""


class StructuralError(ModelError):
    """Dimension or variable-partition defect in a problem instance."""


class EvaluationError(ModelError):
    """Function evaluated outside its certified domain."""


#: objectives are addressed by (decision-maker number, objective number), both 1-based
GoalId = tuple[int, int]


def goal_label(goal_id: GoalId) -> str:
    return "f%d%d" % goal_id


@dataclass(frozen=True)
class AffineForm:
    """c . x + constant"""

    coeffs: tuple[float, ...]
    constant: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def value(self, x: Sequence[float]) -> float:
        return float(sum(c * v for c, v in zip(self.coeffs, x)) + self.constant)

    def scaled(self, k: float) -> "AffineForm":
        return AffineForm(tuple(k * c for c in self.coeffs), k * self.constant)


@dataclass(frozen=True)
class FractionalFunction:
    """numerator(x) / denominator(x), both affine."""

    numerator: AffineForm
    denominator: AffineForm

    @property
    def dim(self) -> int:
        return self.numerator.dim


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: tuple[float, ...]
    relation: Relation
    rhs: float

    def satisfied(self, x: Sequence[float], tol: float = 1e-7) -> bool:
        lhs = sum(c * v for c, v in zip(self.coeffs, x))
        if self.relation is Relation.LE:
            return lhs <= self.rhs + tol
        if self.relation is Relation.GE:
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass(frozen=True)
class Objective:
    sense: Sense
    func: FractionalFunction


@dataclass(frozen=True)
class DecisionLevel:
    """One decision maker: hierarchy level, controlled variables, objectives."""

    level: int  # 1 = upper (leader), 2 = lower (follower)
    dm_index: int  # 1-based, unique across the whole hierarchy
    controlled_vars: tuple[int, ...]
    objectives: tuple[Objective, ...]


@dataclass(frozen=True)
class DBLProblem:
    var_names: tuple[str, ...]
    constraints: tuple[LinearConstraint, ...]
    levels: tuple[DecisionLevel, ...]

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    def iter_objectives(self) -> Iterator[tuple[GoalId, Objective]]:
        for lvl in self.levels:
            for j, obj in enumerate(lvl.objectives, start=1):
                yield (lvl.dm_index, j), obj

    def objective_by_id(self, goal_id: GoalId) -> Objective:
        for gid, obj in self.iter_objectives():
            if gid == goal_id:
                return obj
        raise KeyError(goal_id)

    def upper_level(self) -> DecisionLevel:
        for lvl in self.levels:
            if lvl.level == 1:
                return lvl
        raise StructuralError("problem has no upper-level decision maker")

    def upper_var_indices(self) -> tuple[int, ...]:
        return self.upper_level().controlled_vars


def evaluate(f: FractionalFunction, x: Sequence[float]) -> float:
    """Value of a fractional function at x. The denominator must be positive."""
    den = f.denominator.value(x)
    if den <= DENOM_TOL:
        raise EvaluationError(
            f"denominator {den:.3e} at {tuple(x)} is not certified positive"
        )
    return f.numerator.value(x) / den


@dataclass(frozen=True)
class DenominatorCheck:
    goal_id: GoalId
    label: str
    min_value: float
    ok: bool


@dataclass(frozen=True)
class ValidationReport:
    partition_ok: bool
    feasible: bool
    denominator_checks: tuple[DenominatorCheck, ...]
    messages: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return (
            self.partition_ok
            and self.feasible
            and all(c.ok for c in self.denominator_checks)
        )


def _check_finite(values: Sequence[float], what: str) -> None:
    for v in values:
        if not math.isfinite(v):
            raise StructuralError(f"{what} contains non-finite entry {v!r}")


def _check_structure(problem: DBLProblem) -> None:
    n = problem.n_vars
    if n == 0:
        raise StructuralError("problem declares no variables")
    for i, con in enumerate(problem.constraints, start=1):
        if len(con.coeffs) != n:
            raise StructuralError(
                f"constraint {i}: expected {n} coefficients, got {len(con.coeffs)}"
            )
        _check_finite(con.coeffs, f"constraint {i}")
        _check_finite([con.rhs], f"constraint {i} rhs")
    uppers = [lvl for lvl in problem.levels if lvl.level == 1]
    lowers = [lvl for lvl in problem.levels if lvl.level == 2]
    if len(uppers) != 1:
        raise StructuralError(f"expected exactly one upper-level decision maker, got {len(uppers)}")
    if not lowers:
        raise StructuralError("expected at least one lower-level decision maker")
    seen: set[int] = set()
    for lvl in problem.levels:
        if not lvl.objectives:
            raise StructuralError(f"decision maker {lvl.dm_index} has no objectives")
        for idx in lvl.controlled_vars:
            if idx < 0 or idx >= n:
                raise StructuralError(
                    f"decision maker {lvl.dm_index} controls unknown variable index {idx}"
                )
            if idx in seen:
                raise StructuralError(
                    f"variable {problem.var_names[idx]} controlled by more than one decision maker"
                )
            seen.add(idx)
        for j, obj in enumerate(lvl.objectives, start=1):
            label = goal_label((lvl.dm_index, j))
            for part, form in (("numerator", obj.func.numerator), ("denominator", obj.func.denominator)):
                if form.dim != n:
                    raise StructuralError(
                        f"objective {label} {part}: expected {n} coefficients, got {form.dim}"
                    )
                _check_finite(form.coeffs, f"objective {label} {part}")
                _check_finite([form.constant], f"objective {label} {part} constant")
    if seen != set(range(n)):
        missing = sorted(set(range(n)) - seen)
        names = ", ".join(problem.var_names[i] for i in missing)
        raise StructuralError(f"variables not controlled by any decision maker: {names}")


def validate(problem: DBLProblem) -> ValidationReport:
    """Structural check plus LP-backed feasibility and denominator certificates.

    Structural defects raise StructuralError naming the offender. Semantic
    findings (empty feasible set, denominator not strictly positive over the
    polytope) are reported, not raised.
    """
    from .simplex import LinearProgram, LpStatus, solve_lp

    _check_structure(problem)
    n = problem.n_vars

    zero_obj = AffineForm((0.0,) * n)
    feas = solve_lp(LinearProgram(Sense.MIN, zero_obj, problem.constraints))
    feasible = feas.status is LpStatus.OPTIMAL

    checks = []
    messages = []
    if not feasible:
        messages.append("feasible set is empty")
    else:
        for goal_id, obj in problem.iter_objectives():
            label = goal_label(goal_id)
            den = obj.func.denominator
            sol = solve_lp(LinearProgram(Sense.MIN, den, problem.constraints))
            if sol.status is LpStatus.UNBOUNDED:
                checks.append(DenominatorCheck(goal_id, label, float("-inf"), False))
                messages.append(f"denominator of {label} unbounded below over the feasible set")
                continue
            ok = sol.objective_value > DENOM_TOL
            checks.append(DenominatorCheck(goal_id, label, sol.objective_value, ok))
            if not ok:
                messages.append(
                    f"denominator of {label} reaches {sol.objective_value:.6g} over the feasible set"
                )
    return ValidationReport(
        partition_ok=True,
        feasible=feasible,
        denominator_checks=tuple(checks),
        messages=tuple(messages),
    )
