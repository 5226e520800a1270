"""Interactive solve loop as a resumable state machine.

One session walks: payoff and default goals at start, then repeatedly
compute a candidate (leader model, then full model with the leader's
variables pinned), present it, and either accept or revise tolerances and
weights and loop. History is append-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .model import DBLProblem, GoalId, ModelError, goal_label, validate
from .fractional import PayoffTable, payoff_table
from .fgp import (
    CandidateSolution,
    GoalBinding,
    build_full_fgp,
    build_upper_fgp,
    extract_solution,
    solve_model,
)
from .goals import (
    DegenerateGoalError,
    FuzzyGoal,
    GoalOverride,
    apply_overrides,
    default_goals,
    reciprocal_weight,
)
from .simplex import LpStatus, SimplexError
from .taylor import linearize_goal


class SessionStatus(str, Enum):
    AWAITING_SOLVE = "AwaitingSolve"
    AWAITING_VERDICT = "AwaitingVerdict"
    ACCEPTED = "Accepted"


class InvalidStateError(RuntimeError):
    """Operation not legal in the session's current status."""


class RevisionError(ValueError):
    """Proposed goal revision rejected; session state unchanged."""


@dataclass(frozen=True)
class Accept:
    pass


@dataclass(frozen=True)
class Revise:
    changes: dict[GoalId, GoalOverride]


Verdict = Union[Accept, Revise]


class VerdictKind(str, Enum):
    PENDING = "Pending"
    ACCEPTED = "Accepted"
    REVISED = "Revised"


@dataclass
class Iteration:
    index: int
    goals_snapshot: tuple[FuzzyGoal, ...]
    x_upper: Optional[tuple[float, ...]] = None
    x_full: Optional[tuple[float, ...]] = None
    lambda_upper: Optional[float] = None
    lambda_full: Optional[float] = None
    memberships: Optional[dict[GoalId, float]] = None
    objective_values: Optional[dict[GoalId, float]] = None
    deviations: Optional[dict[GoalId, float]] = None
    multiple_optima: bool = False
    verdict: VerdictKind = VerdictKind.PENDING
    revision: Optional[dict[GoalId, GoalOverride]] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class ComparisonRow:
    """Static reference solution shown alongside ours in reports."""

    label: str
    point: tuple[float, ...]
    memberships: tuple[float, ...]


@dataclass
class SessionState:
    problem: DBLProblem
    payoff: PayoffTable
    goals: tuple[FuzzyGoal, ...]
    status: SessionStatus = SessionStatus.AWAITING_SOLVE
    history: list[Iteration] = field(default_factory=list)
    comparisons: tuple[ComparisonRow, ...] = ()
    name: str = ""


def start_session(
    problem: DBLProblem,
    goal_overrides: Optional[dict[GoalId, GoalOverride]] = None,
    comparisons: tuple[ComparisonRow, ...] = (),
    name: str = "",
) -> SessionState:
    """Validate, build the payoff table, install goals; ready to solve."""
    report = validate(problem)
    if not report.ok:
        raise ModelError("problem failed validation: " + "; ".join(report.messages))
    payoff = payoff_table(problem)
    goals = default_goals(payoff)
    if goal_overrides:
        goals = apply_overrides(goals, goal_overrides, payoff)
    return SessionState(problem, payoff, goals, comparisons=comparisons, name=name)


def _bindings(state: SessionState) -> tuple[GoalBinding, ...]:
    out = []
    for goal in state.goals:
        obj = state.problem.objective_by_id(goal.goal_id)
        lin = linearize_goal(goal, obj.func, state.problem.constraints, state.payoff)
        out.append(GoalBinding(goal, obj.func, lin))
    return tuple(out)


def compute_candidate(state: SessionState) -> Iteration:
    """Leader solve then full-hierarchy solve; appends one iteration."""
    if state.status is not SessionStatus.AWAITING_SOLVE:
        raise InvalidStateError(f"cannot solve while {state.status.value}")
    iteration = Iteration(index=len(state.history) + 1, goals_snapshot=state.goals)
    try:
        bindings = _bindings(state)
        upper_dm = state.problem.upper_level().dm_index
        upper = tuple(b for b in bindings if b.goal.goal_id[0] == upper_dm)
        n = state.problem.n_vars

        upper_model = build_upper_fgp(upper, state.problem.constraints, n)
        upper_sol = solve_model(upper_model)
        if upper_sol.status is not LpStatus.OPTIMAL:
            raise ModelError(f"upper-level model: {upper_sol.status.value}")
        upper_cand = extract_solution(upper_model, upper_sol)

        pinned = {j: upper_cand.x[j] for j in state.problem.upper_var_indices()}
        full_model = build_full_fgp(bindings, state.problem.constraints, n, pinned)
        full_sol = solve_model(full_model)
        if full_sol.status is not LpStatus.OPTIMAL:
            raise ModelError(f"full-hierarchy model: {full_sol.status.value}")
        cand: CandidateSolution = extract_solution(full_model, full_sol)

        iteration.x_upper = upper_cand.x
        iteration.x_full = cand.x
        iteration.lambda_upper = upper_cand.lam
        iteration.lambda_full = cand.lam
        iteration.memberships = cand.memberships
        iteration.objective_values = cand.objective_values
        iteration.deviations = cand.deviations
        iteration.multiple_optima = any(b.lin.multiple_optima for b in bindings) or (
            upper_sol.multiple_optima or full_sol.multiple_optima
        )
        state.history.append(iteration)
        state.status = SessionStatus.AWAITING_VERDICT
    except (ModelError, SimplexError) as exc:
        iteration.error = str(exc)
        state.history.append(iteration)
        # stays AwaitingSolve so the decision maker can revise and retry
    return iteration


def submit_verdict(state: SessionState, verdict: Verdict) -> SessionState:
    """Accept freezes the last candidate; Revise updates goals and loops."""
    if state.status is not SessionStatus.AWAITING_VERDICT:
        raise InvalidStateError(f"no candidate awaiting a verdict while {state.status.value}")
    current = state.history[-1]
    if isinstance(verdict, Accept):
        current.verdict = VerdictKind.ACCEPTED
        state.status = SessionStatus.ACCEPTED
        return state
    if not isinstance(verdict, Revise):
        raise TypeError(f"unknown verdict {verdict!r}")
    known = {g.goal_id for g in state.goals}
    for gid, change in verdict.changes.items():
        if gid not in known:
            raise RevisionError(f"unknown goal {goal_label(gid)}")
        if change.ideal is not None:
            raise RevisionError(
                f"goal {goal_label(gid)}: ideals are fixed for the life of a session"
            )
    try:
        revised = apply_overrides(state.goals, verdict.changes, state.payoff)
    except (DegenerateGoalError, ValueError) as exc:
        raise RevisionError(str(exc)) from exc
    state.goals = revised
    current.verdict = VerdictKind.REVISED
    current.revision = dict(verdict.changes)
    state.status = SessionStatus.AWAITING_SOLVE
    return state


@dataclass(frozen=True)
class SolutionReport:
    name: str
    var_names: tuple[str, ...]
    goal_ids: tuple[GoalId, ...]
    goal_labels: tuple[str, ...]
    upper_dm: int
    iterations: tuple[Iteration, ...]
    comparisons: tuple[ComparisonRow, ...]
    status: SessionStatus


def report(state: SessionState) -> SolutionReport:
    if not state.history:
        raise ModelError("no iterations to report")
    labels = tuple("mu" + goal_label(g.goal_id)[1:] for g in state.goals)
    return SolutionReport(
        name=state.name,
        var_names=state.problem.var_names,
        goal_ids=tuple(g.goal_id for g in state.goals),
        goal_labels=labels,
        upper_dm=state.problem.upper_level().dm_index,
        iterations=tuple(state.history),
        comparisons=state.comparisons,
        status=state.status,
    )
