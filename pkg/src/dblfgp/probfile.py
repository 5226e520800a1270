"""Line-oriented problem files, session persistence, and report rendering.

The file format is deliberately dumb: keyword-led lines with explicit
coefficient vectors, no expression parsing. Numbers serialize with full
round-trip precision; pretty rounding happens only in text reports.

    problem <name>
    vars x0 x1 x2
    dm 1 level 1 controls x0
    min num -1 -4 1 const 1 den 2 3 1 const 2
    constraint 1 1 -1 <= 2
    goal 1 1 ideal -0.7 tolerance 0.6 [weight w]
    compare "label" point 1 0 0 memberships 0.46 0.76 0.31 1 0.54 0.52
"""
from __future__ import annotations

import csv
import io
import json
import shlex
from dataclasses import dataclass, field
from typing import Optional

from .model import (
    AffineForm,
    DBLProblem,
    DecisionLevel,
    FractionalFunction,
    GoalId,
    LinearConstraint,
    Objective,
    Relation,
    Sense,
)
from .goals import GoalOverride
from .session import (
    ComparisonRow,
    Iteration,
    SessionState,
    SessionStatus,
    SolutionReport,
    VerdictKind,
)


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class ProblemDocument:
    problem: DBLProblem
    name: str = ""
    goal_overrides: dict[GoalId, GoalOverride] = field(default_factory=dict)
    comparisons: tuple[ComparisonRow, ...] = ()


_RELATIONS = {"<=": Relation.LE, "=": Relation.EQ, ">=": Relation.GE}


def _num(tok: str, line_no: int, what: str = "number") -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(line_no, f"expected a {what}, got {tok!r}") from None


def _fmt(v: float) -> str:
    # shortest round-trip decimal; integers stay readable
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _parse_coeff_block(toks: list[str], n: int, line_no: int) -> tuple[tuple[float, ...], float, list[str]]:
    if len(toks) < n + 2 or toks[n] != "const":
        raise ParseError(line_no, f"expected {n} coefficients then 'const <value>'")
    coeffs = tuple(_num(t, line_no, "coefficient") for t in toks[:n])
    const = _num(toks[n + 1], line_no, "constant")
    return coeffs, const, toks[n + 2 :]


def parse_document(text: str) -> ProblemDocument:
    name = ""
    var_names: Optional[tuple[str, ...]] = None
    constraints: list[LinearConstraint] = []
    dm_blocks: list[dict] = []
    overrides: dict[GoalId, GoalOverride] = {}
    comparisons: list[ComparisonRow] = []
    current_dm: Optional[dict] = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            toks = shlex.split(line)
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from None
        head = toks[0]

        if head == "problem":
            if len(toks) != 2:
                raise ParseError(line_no, "expected: problem <name>")
            name = toks[1]
        elif head == "vars":
            if var_names is not None:
                raise ParseError(line_no, "duplicate vars line")
            if len(toks) < 2:
                raise ParseError(line_no, "vars line needs at least one name")
            if len(set(toks[1:])) != len(toks[1:]):
                raise ParseError(line_no, "duplicate variable name")
            var_names = tuple(toks[1:])
        elif head == "dm":
            if var_names is None:
                raise ParseError(line_no, "vars must come before dm blocks")
            if len(toks) < 5 or toks[2] != "level" or toks[4] != "controls":
                raise ParseError(line_no, "expected: dm <k> level <1|2> controls <var>...")
            dm_index = int(_num(toks[1], line_no, "dm index"))
            level = int(_num(toks[3], line_no, "level"))
            if level not in (1, 2):
                raise ParseError(line_no, f"level must be 1 or 2, got {level}")
            controlled = []
            for nm in toks[5:]:
                if nm not in var_names:
                    raise ParseError(line_no, f"unknown variable name {nm!r}")
                idx = var_names.index(nm)
                if any(idx in b["controls"] for b in dm_blocks):
                    raise ParseError(line_no, f"variable {nm!r} already controlled")
                controlled.append(idx)
            if len(set(controlled)) != len(controlled):
                raise ParseError(line_no, "variable listed twice in controls")
            current_dm = {"dm": dm_index, "level": level, "controls": controlled, "objectives": []}
            dm_blocks.append(current_dm)
        elif head in ("min", "max"):
            if current_dm is None:
                raise ParseError(line_no, "objective line outside a dm block")
            if var_names is None:
                raise ParseError(line_no, "vars must come before objectives")
            n = len(var_names)
            rest = toks[1:]
            if not rest or rest[0] != "num":
                raise ParseError(line_no, "expected: min|max num <coeffs> const <a> den <coeffs> const <b>")
            num_coeffs, num_const, rest = _parse_coeff_block(rest[1:], n, line_no)
            if not rest or rest[0] != "den":
                raise ParseError(line_no, "missing 'den' block")
            den_coeffs, den_const, rest = _parse_coeff_block(rest[1:], n, line_no)
            if rest:
                raise ParseError(line_no, f"unexpected trailing tokens: {' '.join(rest)}")
            func = FractionalFunction(AffineForm(num_coeffs, num_const), AffineForm(den_coeffs, den_const))
            current_dm["objectives"].append(Objective(Sense(head), func))
        elif head == "constraint":
            if var_names is None:
                raise ParseError(line_no, "vars must come before constraints")
            n = len(var_names)
            if len(toks) != n + 3:
                raise ParseError(line_no, f"expected {n} coefficients, a relation and a rhs")
            coeffs = tuple(_num(t, line_no, "coefficient") for t in toks[1 : n + 1])
            rel = _RELATIONS.get(toks[n + 1])
            if rel is None:
                raise ParseError(line_no, f"unknown relation {toks[n + 1]!r}")
            constraints.append(LinearConstraint(coeffs, rel, _num(toks[n + 2], line_no, "rhs")))
        elif head == "goal":
            if len(toks) < 3:
                raise ParseError(line_no, "expected: goal <dm> <j> [ideal v] [tolerance v] [weight v]")
            gid = (int(_num(toks[1], line_no)), int(_num(toks[2], line_no)))
            fields: dict[str, float] = {}
            rest = toks[3:]
            while rest:
                if len(rest) < 2 or rest[0] not in ("ideal", "tolerance", "weight"):
                    raise ParseError(line_no, f"unexpected goal token {rest[0]!r}")
                fields[rest[0]] = _num(rest[1], line_no)
                rest = rest[2:]
            if gid in overrides:
                raise ParseError(line_no, f"duplicate goal override for {gid}")
            overrides[gid] = GoalOverride(
                ideal=fields.get("ideal"),
                tolerance_limit=fields.get("tolerance"),
                weight=fields.get("weight"),
            )
        elif head == "compare":
            if var_names is None:
                raise ParseError(line_no, "vars must come before compare rows")
            n = len(var_names)
            if len(toks) < 3 or toks[2] != "point":
                raise ParseError(line_no, "expected: compare <label> point <x...> memberships <m...>")
            label = toks[1]
            rest = toks[3:]
            if len(rest) < n + 1 or rest[n] != "memberships":
                raise ParseError(line_no, "expected 'memberships' after the point vector")
            point = tuple(_num(t, line_no) for t in rest[:n])
            mems = tuple(_num(t, line_no) for t in rest[n + 1 :])
            comparisons.append(ComparisonRow(label, point, mems))
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")

    if var_names is None:
        raise ParseError(0, "missing vars line")
    if not dm_blocks:
        raise ParseError(0, "no decision makers defined")
    for b in dm_blocks:
        if not b["objectives"]:
            raise ParseError(0, f"dm {b['dm']}: level requires at least one objective")
    levels = tuple(
        DecisionLevel(b["level"], b["dm"], tuple(b["controls"]), tuple(b["objectives"]))
        for b in dm_blocks
    )
    known = {(lvl.dm_index, j) for lvl in levels for j in range(1, len(lvl.objectives) + 1)}
    for gid in overrides:
        if gid not in known:
            raise ParseError(0, f"goal override for unknown objective {gid}")
    problem = DBLProblem(var_names, tuple(constraints), levels)
    return ProblemDocument(problem, name, overrides, tuple(comparisons))


def parse_problem(text: str) -> DBLProblem:
    return parse_document(text).problem


def serialize_document(doc: ProblemDocument) -> str:
    out = []
    if doc.name:
        out.append(f"problem {doc.name}")
    p = doc.problem
    out.append("vars " + " ".join(p.var_names))
    for lvl in p.levels:
        names = " ".join(p.var_names[i] for i in lvl.controlled_vars)
        out.append(f"dm {lvl.dm_index} level {lvl.level} controls {names}".rstrip())
        for obj in lvl.objectives:
            f = obj.func
            out.append(
                f"{obj.sense.value} num "
                + " ".join(_fmt(c) for c in f.numerator.coeffs)
                + f" const {_fmt(f.numerator.constant)} den "
                + " ".join(_fmt(c) for c in f.denominator.coeffs)
                + f" const {_fmt(f.denominator.constant)}"
            )
    for con in p.constraints:
        out.append(
            "constraint "
            + " ".join(_fmt(c) for c in con.coeffs)
            + f" {con.relation.value} {_fmt(con.rhs)}"
        )
    for gid in sorted(doc.goal_overrides):
        ov = doc.goal_overrides[gid]
        parts = [f"goal {gid[0]} {gid[1]}"]
        if ov.ideal is not None:
            parts.append(f"ideal {_fmt(ov.ideal)}")
        if ov.tolerance_limit is not None:
            parts.append(f"tolerance {_fmt(ov.tolerance_limit)}")
        if ov.weight is not None:
            parts.append(f"weight {_fmt(ov.weight)}")
        out.append(" ".join(parts))
    for row in doc.comparisons:
        out.append(
            f'compare "{row.label}" point '
            + " ".join(_fmt(v) for v in row.point)
            + " memberships "
            + " ".join(_fmt(v) for v in row.memberships)
        )
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# session persistence

_SESSION_HEADER = "dblfgp-session v1"


def serialize_session(state: SessionState) -> str:
    from .fractional import PayoffRow  # noqa: F401  (documented shape)

    out = [_SESSION_HEADER, f"status {state.status.value}"]
    doc = ProblemDocument(state.problem, state.name, {}, state.comparisons)
    out.append("begin-problem")
    out.append(serialize_document(doc).rstrip("\n"))
    out.append("end-problem")
    for g in state.goals:
        out.append(
            f"goal {g.goal_id[0]} {g.goal_id[1]} direction {g.direction.value} "
            f"ideal {_fmt(g.ideal)} tolerance {_fmt(g.tolerance_limit)} weight {_fmt(g.weight)}"
        )
    for row in state.payoff.rows:
        out.append(
            f"payoff {row.goal_id[0]} {row.goal_id[1]} sense {row.sense.value} "
            f"min {_fmt(row.min_value)} max {_fmt(row.max_value)} argmin "
            + " ".join(_fmt(v) for v in row.argmin)
            + " argmax "
            + " ".join(_fmt(v) for v in row.argmax)
        )
    for it in state.history:
        out.append(f"begin-iteration {it.index}")
        out.append(f"verdict {it.verdict.value}")
        if it.error is not None:
            out.append(f"failed {json.dumps(it.error)}")
        if it.x_upper is not None:
            out.append("xF " + " ".join(_fmt(v) for v in it.x_upper))
            out.append("xS " + " ".join(_fmt(v) for v in it.x_full))
            out.append(f"lambda-upper {_fmt(it.lambda_upper)}")
            out.append(f"lambda-full {_fmt(it.lambda_full)}")
            for gid in sorted(it.memberships):
                out.append(f"membership {gid[0]} {gid[1]} {_fmt(it.memberships[gid])}")
            for gid in sorted(it.objective_values):
                out.append(f"objective {gid[0]} {gid[1]} {_fmt(it.objective_values[gid])}")
            for gid in sorted(it.deviations):
                out.append(f"deviation {gid[0]} {gid[1]} {_fmt(it.deviations[gid])}")
            if it.multiple_optima:
                out.append("multiple-optima")
        for g in it.goals_snapshot:
            out.append(
                f"goal-snapshot {g.goal_id[0]} {g.goal_id[1]} direction {g.direction.value} "
                f"ideal {_fmt(g.ideal)} tolerance {_fmt(g.tolerance_limit)} weight {_fmt(g.weight)}"
            )
        if it.revision:
            for gid in sorted(it.revision):
                ov = it.revision[gid]
                parts = [f"revision {gid[0]} {gid[1]}"]
                if ov.tolerance_limit is not None:
                    parts.append(f"tolerance {_fmt(ov.tolerance_limit)}")
                if ov.weight is not None:
                    parts.append(f"weight {_fmt(ov.weight)}")
                out.append(" ".join(parts))
        out.append("end-iteration")
    return "\n".join(out) + "\n"


def parse_session(text: str) -> SessionState:
    from .fractional import PayoffRow, PayoffTable
    from .goals import Direction, FuzzyGoal

    lines = text.splitlines()
    if not lines or lines[0].strip() != _SESSION_HEADER:
        raise ParseError(1, "not a session document")
    status: Optional[SessionStatus] = None
    problem_lines: list[str] = []
    goals: list = []
    payoff_rows: list[PayoffRow] = []
    iterations: list[Iteration] = []
    current: Optional[dict] = None
    in_problem = False

    def gid_of(toks, line_no) -> GoalId:
        return (int(_num(toks[0], line_no)), int(_num(toks[1], line_no)))

    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line == "begin-problem":
            in_problem = True
            continue
        if line == "end-problem":
            in_problem = False
            continue
        if in_problem:
            problem_lines.append(raw)
            continue
        toks = shlex.split(line)
        head = toks[0]
        if head == "status":
            status = SessionStatus(toks[1])
        elif head == "goal":
            gid = gid_of(toks[1:3], line_no)
            kv = dict(zip(toks[3::2], toks[4::2]))
            goals.append(
                FuzzyGoal(
                    gid,
                    "mu%d%d" % gid,
                    Direction(kv["direction"]),
                    float(kv["ideal"]),
                    float(kv["tolerance"]),
                    float(kv["weight"]),
                )
            )
        elif head == "payoff":
            gid = gid_of(toks[1:3], line_no)
            rest = toks[3:]
            if rest[:1] != ["sense"] or rest[2] != "min" or rest[4] != "max" or rest[6] != "argmin":
                raise ParseError(line_no, "malformed payoff line")
            sense = Sense(rest[1])
            vmin = float(rest[3])
            vmax = float(rest[5])
            i_amax = rest.index("argmax", 7)
            argmin = tuple(float(t) for t in rest[7:i_amax])
            argmax = tuple(float(t) for t in rest[i_amax + 1 :])
            payoff_rows.append(
                PayoffRow(gid, "f%d%d" % gid, sense, vmin, vmax, argmin, argmax)
            )
        elif head == "begin-iteration":
            current = {
                "index": int(toks[1]), "verdict": VerdictKind.PENDING, "error": None,
                "xF": None, "xS": None, "lu": None, "lf": None, "mem": {}, "obj": {},
                "dev": {}, "multi": False, "snapshot": [], "revision": {},
            }
        elif head == "end-iteration":
            assert current is not None
            it = Iteration(
                index=current["index"],
                goals_snapshot=tuple(current["snapshot"]),
                x_upper=current["xF"],
                x_full=current["xS"],
                lambda_upper=current["lu"],
                lambda_full=current["lf"],
                memberships=current["mem"] or None,
                objective_values=current["obj"] or None,
                deviations=current["dev"] or None,
                multiple_optima=current["multi"],
                verdict=current["verdict"],
                revision=current["revision"] or None,
                error=current["error"],
            )
            iterations.append(it)
            current = None
        elif current is not None:
            if head == "verdict":
                current["verdict"] = VerdictKind(toks[1])
            elif head == "failed":
                current["error"] = json.loads(line.split(" ", 1)[1])
            elif head == "xF":
                current["xF"] = tuple(float(t) for t in toks[1:])
            elif head == "xS":
                current["xS"] = tuple(float(t) for t in toks[1:])
            elif head == "lambda-upper":
                current["lu"] = float(toks[1])
            elif head == "lambda-full":
                current["lf"] = float(toks[1])
            elif head == "membership":
                current["mem"][gid_of(toks[1:3], line_no)] = float(toks[3])
            elif head == "objective":
                current["obj"][gid_of(toks[1:3], line_no)] = float(toks[3])
            elif head == "deviation":
                current["dev"][gid_of(toks[1:3], line_no)] = float(toks[3])
            elif head == "multiple-optima":
                current["multi"] = True
            elif head == "goal-snapshot":
                gid = gid_of(toks[1:3], line_no)
                kv = dict(zip(toks[3::2], toks[4::2]))
                current["snapshot"].append(
                    FuzzyGoal(
                        gid, "mu%d%d" % gid, Direction(kv["direction"]),
                        float(kv["ideal"]), float(kv["tolerance"]), float(kv["weight"]),
                    )
                )
            elif head == "revision":
                gid = gid_of(toks[1:3], line_no)
                kv = dict(zip(toks[3::2], toks[4::2]))
                current["revision"][gid] = GoalOverride(
                    tolerance_limit=float(kv["tolerance"]) if "tolerance" in kv else None,
                    weight=float(kv["weight"]) if "weight" in kv else None,
                )
            else:
                raise ParseError(line_no, f"unknown iteration directive {head!r}")
        else:
            raise ParseError(line_no, f"unknown session directive {head!r}")

    if status is None:
        raise ParseError(0, "session document missing status")
    doc = parse_document("\n".join(problem_lines))
    return SessionState(
        problem=doc.problem,
        payoff=PayoffTable(tuple(payoff_rows)),
        goals=tuple(goals),
        status=status,
        history=iterations,
        comparisons=doc.comparisons,
        name=doc.name,
    )


# ---------------------------------------------------------------------------
# report rendering

def _report_rows(rep: SolutionReport) -> list[dict]:
    upper_positions = [k for k, gid in enumerate(rep.goal_ids) if gid[0] == rep.upper_dm]
    rows = []
    for it in rep.iterations:
        if it.failed:
            rows.append({"kind": "failed", "iteration": it.index, "error": it.error})
            continue
        order = [g.goal_id for g in it.goals_snapshot]
        rows.append(
            {
                "kind": "candidate",
                "iteration": it.index,
                "verdict": it.verdict.value,
                "x": list(it.x_full),
                "lambdaUpper": it.lambda_upper,
                "lambdaFull": it.lambda_full,
                "memberships": [it.memberships[g] for g in order],
                "objectives": [it.objective_values[g] for g in order],
                "upperMembershipSum": sum(
                    it.memberships[g] for g in order if g[0] == rep.upper_dm
                ),
            }
        )
    for cmp_row in rep.comparisons:
        rows.append(
            {
                "kind": "comparison",
                "label": cmp_row.label,
                "x": list(cmp_row.point),
                "memberships": list(cmp_row.memberships),
                "upperMembershipSum": sum(
                    cmp_row.memberships[k] for k in upper_positions if k < len(cmp_row.memberships)
                ),
            }
        )
    return rows


def render_report(rep: SolutionReport, fmt: str = "text") -> bytes:
    rows = _report_rows(rep)
    if fmt == "json":
        payload = {
            "name": rep.name,
            "status": rep.status.value,
            "varNames": list(rep.var_names),
            "goalLabels": list(rep.goal_labels),
            "rows": rows,
        }
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = (
            ["kind", "iteration", "label", "verdict"]
            + [f"x_{n}" for n in rep.var_names]
            + ["lambdaUpper", "lambdaFull"]
            + [f"mu_{lbl[2:]}" for lbl in rep.goal_labels]
            + [f"f_{lbl[2:]}" for lbl in rep.goal_labels]
        )
        writer.writerow(header)
        for row in rows:
            if row["kind"] == "failed":
                writer.writerow(["failed", row["iteration"], "", row["error"]])
                continue
            writer.writerow(
                [
                    row["kind"],
                    row.get("iteration", ""),
                    row.get("label", ""),
                    row.get("verdict", ""),
                ]
                + [repr(v) for v in row["x"]]
                + [
                    repr(row["lambdaUpper"]) if "lambdaUpper" in row else "",
                    repr(row["lambdaFull"]) if "lambdaFull" in row else "",
                ]
                + [repr(v) for v in row["memberships"]]
                + [repr(v) for v in row.get("objectives", [])]
            )
        return buf.getvalue().encode()
    if fmt == "text":
        lines = []
        title = rep.name or "solution report"
        lines.append(title)
        lines.append("=" * len(title))
        lines.append("status: " + rep.status.value)
        for row in rows:
            if row["kind"] == "failed":
                lines.append(f"iteration {row['iteration']}: failed ({row['error']})")
                continue
            if row["kind"] == "candidate":
                lines.append(
                    f"iteration {row['iteration']} ({row['verdict']})  x = "
                    + " ".join(f"{v:.3f}" for v in row["x"])
                )
                lines.append(
                    f"  lambda upper {row['lambdaUpper']:.3f}  lambda full {row['lambdaFull']:.3f}"
                )
                lines.append("  objectives  " + " ".join(f"{v:.3f}" for v in row["objectives"]))
                lines.append("  memberships " + " ".join(f"{v:.3f}" for v in row["memberships"]))
            else:
                lines.append(
                    f"comparison {row['label']}  x = "
                    + " ".join(f"{v:.3f}" for v in row["x"])
                )
                lines.append("  memberships " + " ".join(f"{v:.3f}" for v in row["memberships"]))
            lines.append(
                "  upper-level membership sum " + f"{row['upperMembershipSum']:.3f}"
            )
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {fmt!r}")
