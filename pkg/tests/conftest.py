import pytest

from dblfgp.model import (
    AffineForm,
    DBLProblem,
    DecisionLevel,
    FractionalFunction,
    LinearConstraint,
    Objective,
    Relation,
    Sense,
)


def _frac(num, nc, den, dc):
    return FractionalFunction(AffineForm(num, nc), AffineForm(den, dc))


def build_example1() -> DBLProblem:
    """Worked bilevel instance: one leader (x0), two followers (x1, x2)."""
    f11 = _frac((-1, -4, 1), 1, (2, 3, 1), 2)
    f12 = _frac((-2, 1, 3), 4, (2, -1, 1), 5)
    f21 = _frac((3, -2, 2), 0, (1, 1, 1), 3)
    f22 = _frac((-7, -2, 1), 1, (5, 2, 1), 1)
    f31 = _frac((1, 1, 1), -4, (1, -2, 10), 6)
    f32 = _frac((2, -1, 1), 4, (-1, 1, 1), 10)
    cons = (
        LinearConstraint((1, 1, 1), Relation.LE, 5),
        LinearConstraint((1, 1, -1), Relation.LE, 2),
        LinearConstraint((1, 1, 1), Relation.GE, 1),
        LinearConstraint((-1, 1, 1), Relation.LE, 1),
        LinearConstraint((1, -1, 1), Relation.LE, 4),
        LinearConstraint((1, 0, 2), Relation.LE, 3),
    )
    levels = (
        DecisionLevel(1, 1, (0,), (Objective(Sense.MIN, f11), Objective(Sense.MIN, f12))),
        DecisionLevel(2, 2, (1,), (Objective(Sense.MIN, f21), Objective(Sense.MIN, f22))),
        DecisionLevel(2, 3, (2,), (Objective(Sense.MIN, f31), Objective(Sense.MIN, f32))),
    )
    return DBLProblem(("x0", "x1", "x2"), cons, levels)


#: decision-maker chosen goal parameters for the worked instance
EXAMPLE1_GOAL_PARAMS = {
    (1, 1): (-0.7, 0.6, None),
    (1, 2): (0.0, 1.2, None),
    (2, 1): (-0.5, 1.3, None),
    (2, 2): (-1.0, 1.0, None),
    (3, 1): (-0.75, -0.05, None),
    (3, 2): (0.125, 1.125, 1.1428571428571428),
}

EXAMPLE1_BAKY_ROW = ((1.0, 0.0, 0.0), (0.46, 0.76, 0.31, 1.0, 0.54, 0.52))


def example1_overrides():
    from dblfgp.goals import GoalOverride

    return {
        gid: GoalOverride(ideal=i, tolerance_limit=t, weight=w)
        for gid, (i, t, w) in EXAMPLE1_GOAL_PARAMS.items()
    }


@pytest.fixture(scope="session")
def example1():
    return build_example1()


@pytest.fixture(scope="session")
def example1_payoff(example1):
    from dblfgp.fractional import payoff_table

    return payoff_table(example1)


@pytest.fixture(scope="session")
def example1_grid(example1):
    """Feasible 0.01-step grid points of the worked instance, shared across tests."""
    from oracles import grid_feasible_points

    return grid_feasible_points(example1.constraints, 3, 0.0, 5.0, 0.01)


@pytest.fixture(scope="session")
def example1_goals(example1_payoff):
    import warnings

    from dblfgp.goals import GoalAspirationWarning, apply_overrides, default_goals

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GoalAspirationWarning)
        return apply_overrides(default_goals(example1_payoff), example1_overrides(), example1_payoff)


def build_toy_problem() -> DBLProblem:
    """Two variables, one linear-ish objective per level, tiny box."""
    top = _frac((1, 1), 0, (0, 0), 1)  # x0 + x1, constant denominator
    bottom = _frac((1, -1), 0, (1, 1), 2)
    cons = (
        LinearConstraint((1, 1), Relation.LE, 2),
        LinearConstraint((1, 0), Relation.LE, 1.5),
    )
    levels = (
        DecisionLevel(1, 1, (0,), (Objective(Sense.MIN, top),)),
        DecisionLevel(2, 2, (1,), (Objective(Sense.MIN, bottom),)),
    )
    return DBLProblem(("x0", "x1"), cons, levels)


@pytest.fixture()
def toy_problem():
    return build_toy_problem()
