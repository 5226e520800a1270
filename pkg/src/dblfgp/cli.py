"""Command-line surface.

Commands: validate, payoff, solve (one pass, auto-accept), interactive
(terminal verdict loop), serve (HTTP API). Exit codes: 0 success,
1 infeasible or degenerate problem, 2 input error.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from importlib import resources
from pathlib import Path

from .goals import DegenerateGoalError, GoalAspirationWarning, GoalOverride
from .model import ModelError, StructuralError, goal_label, validate
from .probfile import ParseError, parse_document, render_report
from .session import (
    Accept,
    Revise,
    RevisionError,
    SessionStatus,
    compute_candidate,
    report,
    start_session,
    submit_verdict,
)
from .simplex import SimplexError

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2


def _load_document(spec: str):
    path = Path(spec)
    if path.exists():
        text = path.read_text()
    else:
        bundled = resources.files("dblfgp").joinpath("examples", f"{spec}.dbl")
        if not bundled.is_file():
            raise FileNotFoundError(f"no such problem file or bundled example: {spec}")
        text = bundled.read_text()
    return parse_document(text)


def _start(doc):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GoalAspirationWarning)
        state = start_session(doc.problem, doc.goal_overrides, doc.comparisons, doc.name)
    for w in caught:
        print(f"note: {w.message}", file=sys.stderr)
    return state


def _fmt_vec(values) -> str:
    return " ".join(f"{v:.3f}" for v in values)


def cmd_validate(args) -> int:
    doc = _load_document(args.file)
    rep = validate(doc.problem)
    print(f"variables: {len(doc.problem.var_names)}  constraints: {len(doc.problem.constraints)}")
    print(f"partition: {'ok' if rep.partition_ok else 'BROKEN'}")
    print(f"feasible: {'yes' if rep.feasible else 'NO'}")
    for chk in rep.denominator_checks:
        flag = "ok" if chk.ok else "FAIL"
        print(f"denominator {chk.label}: min {chk.min_value:.6f} [{flag}]")
    for msg in rep.messages:
        print(f"problem: {msg}")
    return EXIT_OK if rep.ok else EXIT_INFEASIBLE


def cmd_payoff(args) -> int:
    doc = _load_document(args.file)
    state = _start(doc)
    print("objective  min        max        argmin / argmax")
    for row in state.payoff.rows:
        print(
            f"{row.label:<9} {row.min_value: .4f}   {row.max_value: .4f}   "
            f"({_fmt_vec(row.argmin)}) / ({_fmt_vec(row.argmax)})"
        )
    return EXIT_OK


def _print_candidate(state, it) -> None:
    print(f"iteration {it.index}")
    print(f"  leader solution   xF = {_fmt_vec(it.x_upper)}   lambda = {it.lambda_upper:.3f}")
    print(f"  hierarchy solution xS = {_fmt_vec(it.x_full)}   lambda = {it.lambda_full:.3f}")
    order = [g.goal_id for g in it.goals_snapshot]
    print("  objectives  " + " ".join(f"{goal_label(g)}={it.objective_values[g]:.3f}" for g in order))
    print("  memberships " + " ".join(f"{it.memberships[g]:.3f}" for g in order))
    if it.multiple_optima:
        print("  note: an optimal face is not unique; this is the deterministic vertex")


def cmd_solve(args) -> int:
    doc = _load_document(args.file)
    state = _start(doc)
    it = compute_candidate(state)
    if it.failed:
        print(f"candidate failed: {it.error}", file=sys.stderr)
        return EXIT_INFEASIBLE
    submit_verdict(state, Accept())
    sys.stdout.buffer.write(render_report(report(state), args.format))
    return EXIT_OK


def cmd_interactive(args) -> int:
    doc = _load_document(args.file)
    state = _start(doc)
    print(f"problem {doc.name or args.file}: {len(state.goals)} goals")
    _print_payoff_rows(state)
    while state.status is not SessionStatus.ACCEPTED:
        it = compute_candidate(state)
        if it.failed:
            print(f"candidate failed: {it.error}")
            if not _revise_prompt(state):
                return EXIT_INFEASIBLE
            continue
        _print_candidate(state, it)
        answer = _ask("[a]ccept, [r]evise, or [q]uit? ")
        if answer.startswith("a"):
            submit_verdict(state, Accept())
        elif answer.startswith("r"):
            _revise_prompt(state)
        elif answer.startswith("q"):
            print("leaving without accepting")
            return EXIT_OK
    print("accepted solution:")
    sys.stdout.buffer.write(render_report(report(state), "text"))
    return EXIT_OK


def _ask(prompt: str) -> str:
    try:
        return input(prompt).strip().lower()
    except EOFError:
        return "q"


def _revise_prompt(state) -> bool:
    """Collect new tolerances/weights per goal; empty input keeps a value."""
    changes: dict = {}
    for g in state.goals:
        line = _ask(
            f"{g.label} (ideal {g.ideal:.3f}, tolerance {g.tolerance_limit:.3f}, "
            f"weight {g.weight:.3f}) new tolerance[,weight]: "
        )
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            tol = float(parts[0]) if parts[0] else None
            weight = float(parts[1]) if len(parts) > 1 and parts[1] else None
        except ValueError:
            print("  not a number, keeping current values")
            continue
        changes[g.goal_id] = GoalOverride(tolerance_limit=tol, weight=weight)
    if not changes:
        print("no changes entered")
        return False
    if state.status is not SessionStatus.AWAITING_VERDICT:
        # failed candidate left us in the solvable state; apply directly
        from .goals import apply_overrides

        try:
            state.goals = apply_overrides(state.goals, changes, state.payoff)
        except (DegenerateGoalError, ValueError) as exc:
            print(f"revision rejected: {exc}")
            return False
        return True
    try:
        submit_verdict(state, Revise(changes))
    except RevisionError as exc:
        print(f"revision rejected: {exc}")
        return False
    return True


def _print_payoff_rows(state) -> None:
    for row in state.payoff.rows:
        print(f"  {row.label}: min {row.min_value:.4f}  max {row.max_value:.4f}")


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(state_dir=args.state_dir, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dblfgp",
        description="Interactive fuzzy goal programming for decentralized bi-level "
        "multiobjective fractional programs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural and feasibility checks")
    p.add_argument("file", help="problem file path or bundled example name")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("payoff", help="individual minima/maxima of every objective")
    p.add_argument("file")
    p.set_defaults(func=cmd_payoff)

    p = sub.add_parser("solve", help="one non-interactive pass, auto-accept")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("interactive", help="terminal verdict loop")
    p.add_argument("file")
    p.set_defaults(func=cmd_interactive)

    p = sub.add_parser("serve", help="HTTP API for the decision-maker console")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--state-dir", default=None, help="persist sessions here")
    p.add_argument("--static-dir", default=None, help="serve the console UI from here")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, StructuralError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelError, DegenerateGoalError, SimplexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
