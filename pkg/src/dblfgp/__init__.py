"""Interactive fuzzy goal programming for decentralized bi-level
multiobjective linear-fractional programs."""

from .model import (
    AffineForm,
    DBLProblem,
    DecisionLevel,
    EvaluationError,
    FractionalFunction,
    LinearConstraint,
    ModelError,
    Objective,
    Relation,
    Sense,
    StructuralError,
    ValidationReport,
    evaluate,
    validate,
)
from .simplex import LinearProgram, LpSolution, LpStatus, SimplexError, solve_lp
from .fractional import (
    DegeneracyError,
    FeasibleSetError,
    PayoffRow,
    PayoffTable,
    optimize_fractional,
    payoff_table,
)
from .goals import (
    DegenerateGoalError,
    Direction,
    FuzzyGoal,
    GoalAspirationWarning,
    GoalOverride,
    apply_overrides,
    default_goals,
    membership_expression,
    membership_value,
)
from .taylor import (
    LinearizedMembership,
    gradient_fractional,
    linearize_goal,
    maximizer_point,
    taylor_linearize,
)
from .fgp import (
    CandidateSolution,
    FgpModel,
    GoalBinding,
    ModelKind,
    build_full_fgp,
    build_upper_fgp,
    build_weighted_sum,
    extract_solution,
    solve_model,
)
from .session import (
    Accept,
    ComparisonRow,
    InvalidStateError,
    Iteration,
    Revise,
    RevisionError,
    SessionState,
    SessionStatus,
    SolutionReport,
    VerdictKind,
    compute_candidate,
    report,
    start_session,
    submit_verdict,
)

__version__ = "0.1.0"
