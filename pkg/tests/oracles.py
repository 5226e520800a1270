"""Independent oracles the tests check the solvers against.

Nothing here shares code with the package's optimization paths: vertices come
from brute-force enumeration of tight constraint subsets, ratio optima from a
dense grid, gradients from central differences.
"""
from __future__ import annotations

import itertools
import random

import numpy as np

from dblfgp.model import FractionalFunction, LinearConstraint, Relation

FEAS_EPS = 1e-7


def _as_matrix(constraints, n):
    rows, rels, rhs = [], [], []
    for c in constraints:
        rows.append(list(c.coeffs))
        rels.append(c.relation)
        rhs.append(c.rhs)
    return np.array(rows, dtype=float).reshape(len(rows), n), rels, np.array(rhs, dtype=float)


def feasible(constraints, x, tol=FEAS_EPS):
    if any(v < -tol for v in x):
        return False
    return all(c.satisfied(x, tol) for c in constraints)


def enumerate_vertices(constraints, n):
    """All vertices of {A x rel b, x >= 0} by solving every n-subset of rows.

    Any vertex has n linearly independent active rows, so it shows up as the
    solution of one of the subsets; infeasible subset solutions are filtered.
    Intended for small instances only.
    """
    a, rels, b = _as_matrix(constraints, n)
    rows = [(a[i], b[i]) for i in range(len(rels))]
    rows += [(np.eye(n)[j], 0.0) for j in range(n)]  # x_j >= 0 as candidate tight rows

    systems = [list(combo) for combo in itertools.combinations(range(len(rows)), n)]
    if not systems:
        return []

    mats = np.array([[rows[i][0] for i in idx] for idx in systems])
    rhss = np.array([[rows[i][1] for i in idx] for idx in systems])
    dets = np.abs(np.linalg.det(mats))
    vertices = []
    solvable = dets > 1e-10
    if solvable.any():
        sols = np.linalg.solve(mats[solvable], rhss[solvable][..., None])[..., 0]
        for x in sols:
            if feasible(constraints, x):
                vertices.append(tuple(float(v) for v in x))
    # dedupe
    out = []
    for v in vertices:
        if not any(max(abs(a - b) for a, b in zip(v, w)) < 1e-7 for w in out):
            out.append(v)
    return out


def lp_extreme_by_vertices(constraints, n, objective_coeffs, maximize=True):
    verts = enumerate_vertices(constraints, n)
    assert verts, "oracle found no vertices"
    vals = [sum(c * v for c, v in zip(objective_coeffs, x)) for x in verts]
    return (max(vals) if maximize else min(vals)), verts


def grid_feasible_points(constraints, n, lo=0.0, hi=5.0, step=0.01):
    """Grid points of [lo, hi]^n kept by the constraints, as an (n, k) array.

    Axes are clipped to the polytope's own coordinate range (taken from the
    enumerated vertices) before gridding; everything outside that range fails
    the constraint filter anyway.
    """
    ubs = [hi] * n
    verts = enumerate_vertices(constraints, n)
    if verts:
        for j in range(n):
            ubs[j] = min(hi, max(v[j] for v in verts))
    axes = [np.arange(lo, ub + step / 2, step) for ub in ubs]
    axis = axes[0]
    a, rels, b = _as_matrix(constraints, n)
    rest = np.meshgrid(*axes[1:], indexing="ij") if n > 1 else []
    rest_flat = np.stack([g.ravel() for g in rest], axis=0) if n > 1 else np.zeros((0, 1))
    npts = rest_flat.shape[1]
    kept = []
    chunk = 32
    for start in range(0, len(axis), chunk):
        xs = axis[start : start + chunk]
        k = len(xs)
        first = np.repeat(xs, npts)
        pts = np.vstack([first, np.tile(rest_flat, k)]) if n > 1 else first[None, :]
        lhs = a @ pts
        mask = np.ones(pts.shape[1], dtype=bool)
        for i, rel in enumerate(rels):
            if rel is Relation.LE:
                mask &= lhs[i] <= b[i] + FEAS_EPS
            elif rel is Relation.GE:
                mask &= lhs[i] >= b[i] - FEAS_EPS
            else:
                mask &= np.abs(lhs[i] - b[i]) <= step  # grid rarely hits equalities exactly
        if mask.any():
            kept.append(pts[:, mask])
    assert kept, "grid oracle found no feasible point"
    return np.hstack(kept)


def grid_ratio_extremes(f: FractionalFunction, constraints, n, lo=0.0, hi=5.0, step=0.01,
                        points=None):
    """Min and max of a ratio over grid points of [lo, hi]^n kept by the constraints."""
    pts = grid_feasible_points(constraints, n, lo, hi, step) if points is None else points
    num = np.array(f.numerator.coeffs) @ pts + f.numerator.constant
    den = np.array(f.denominator.coeffs) @ pts + f.denominator.constant
    ok = den > 1e-9
    vals = num[ok] / den[ok]
    sel = pts[:, ok]
    i_min, i_max = int(np.argmin(vals)), int(np.argmax(vals))
    return (
        float(vals[i_min]),
        float(vals[i_max]),
        tuple(float(v) for v in sel[:, i_min]),
        tuple(float(v) for v in sel[:, i_max]),
    )


def central_difference_gradient(func, x, h=1e-5):
    x = list(x)
    grad = []
    for j in range(len(x)):
        xp, xm = list(x), list(x)
        xp[j] += h
        xm[j] -= h
        grad.append((func(xp) - func(xm)) / (2 * h))
    return tuple(grad)


def random_bounded_lp(rng: random.Random):
    """A feasible-by-construction LP with <= 6 vars and <= 8 constraints.

    Feasibility: every row's rhs is set from a known interior point. Bounded:
    a simplex-style cap row sum(x) <= C is always present.
    """
    from dblfgp.model import AffineForm, Sense
    from dblfgp.simplex import LinearProgram

    n = rng.randint(2, 6)
    x0 = [rng.uniform(0.0, 3.0) for _ in range(n)]
    cons = [LinearConstraint((1.0,) * n, Relation.LE, sum(x0) + rng.uniform(1.0, 5.0))]
    m = rng.randint(1, 7)
    for _ in range(m):
        coeffs = tuple(float(rng.randint(-4, 4)) for _ in range(n))
        lhs = sum(c * v for c, v in zip(coeffs, x0))
        kind = rng.random()
        if kind < 0.6:
            cons.append(LinearConstraint(coeffs, Relation.LE, lhs + rng.uniform(0.0, 4.0)))
        elif kind < 0.85:
            cons.append(LinearConstraint(coeffs, Relation.GE, lhs - rng.uniform(0.0, 4.0)))
        else:
            cons.append(LinearConstraint(coeffs, Relation.EQ, lhs))
    obj = AffineForm(tuple(float(rng.randint(-5, 5)) for _ in range(n)), float(rng.randint(-3, 3)))
    sense = Sense.MAX if rng.random() < 0.5 else Sense.MIN
    return LinearProgram(sense, obj, tuple(cons))


def random_dbl_problem(rng: random.Random):
    """Small random bilevel fractional instance with a certified-positive
    denominator (nonnegative coefficients, positive constant) and a
    full-dimensional bounded feasible set."""
    from dblfgp.model import (
        AffineForm,
        DBLProblem,
        DecisionLevel,
        FractionalFunction,
        Objective,
        Sense,
    )

    n = rng.randint(2, 4)
    x0 = [rng.uniform(0.2, 2.0) for _ in range(n)]
    cons = [LinearConstraint((1.0,) * n, Relation.LE, sum(x0) + rng.uniform(1.0, 3.0))]
    for _ in range(rng.randint(1, 3)):
        coeffs = tuple(float(rng.randint(-3, 3)) for _ in range(n))
        lhs = sum(c * v for c, v in zip(coeffs, x0))
        cons.append(LinearConstraint(coeffs, Relation.LE, lhs + rng.uniform(0.5, 3.0)))

    def frac():
        num = [float(rng.randint(-4, 4)) for _ in range(n)]
        if all(c == 0 for c in num):
            num[rng.randrange(n)] = 1.0
        den = [float(rng.randint(0, 3)) for _ in range(n)]
        return FractionalFunction(
            AffineForm(tuple(num), float(rng.randint(-2, 2))),
            AffineForm(tuple(den), float(rng.randint(1, 4))),
        )

    def objectives(k):
        return tuple(
            Objective(Sense.MIN if rng.random() < 0.7 else Sense.MAX, frac()) for _ in range(k)
        )

    n_followers = rng.randint(1, min(2, n - 1))
    cut = rng.randint(1, n - n_followers)
    blocks = [tuple(range(cut))]
    remaining = list(range(cut, n))
    per = max(1, len(remaining) // n_followers)
    for i in range(n_followers):
        chunk = remaining[i * per : (i + 1) * per] if i < n_followers - 1 else remaining[i * per :]
        blocks.append(tuple(chunk))
    levels = [DecisionLevel(1, 1, blocks[0], objectives(rng.randint(1, 2)))]
    for i, blk in enumerate(blocks[1:], start=2):
        levels.append(DecisionLevel(2, i, blk, objectives(rng.randint(1, 2))))
    names = tuple(f"x{j}" for j in range(n))
    return DBLProblem(names, tuple(cons), tuple(levels))
