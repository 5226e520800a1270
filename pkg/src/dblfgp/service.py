"""HTTP facade over sessions for the decision-maker console.

Every numeric field crosses the wire as a decimal string (shortest
round-trip form) so golden UI tests stay bit-stable across stacks. Requests
against one session are serialized by a per-session lock; the loser of a
state race gets 409, never a corrupted state.
"""
from __future__ import annotations

import threading
import uuid
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .goals import DegenerateGoalError, GoalAspirationWarning, GoalOverride
from .model import ModelError, StructuralError, goal_label
from .probfile import (
    ParseError,
    parse_document,
    parse_session,
    render_report,
    serialize_session,
)
from .session import (
    Accept,
    InvalidStateError,
    Revise,
    RevisionError,
    SessionState,
    SessionStatus,
    compute_candidate,
    report,
    start_session,
    submit_verdict,
)


def _s(v: float) -> str:
    return repr(float(v))


def _vec(values) -> list[str]:
    return [_s(v) for v in values]


@dataclass
class _Entry:
    state: SessionState
    lock: threading.Lock


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details=None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}


def _summary(sid: str, state: SessionState) -> dict:
    return {
        "id": sid,
        "status": state.status.value,
        "iterations": str(len(state.history)),
        "name": state.name,
        "varNames": list(state.problem.var_names),
        "goals": [
            {
                "dm": str(g.goal_id[0]),
                "index": str(g.goal_id[1]),
                "label": g.label,
                "objectiveLabel": goal_label(g.goal_id),
                "direction": g.direction.value,
                "ideal": _s(g.ideal),
                "tolerance": _s(g.tolerance_limit),
                "weight": _s(g.weight),
            }
            for g in state.goals
        ],
    }


def _iteration_view(state: SessionState, it) -> dict:
    if it.failed:
        return {"index": str(it.index), "failed": True, "error": it.error}
    order = [g.goal_id for g in it.goals_snapshot]
    return {
        "index": str(it.index),
        "failed": False,
        "verdict": it.verdict.value,
        "xF": _vec(it.x_upper),
        "xS": _vec(it.x_full),
        "lambdaUpper": _s(it.lambda_upper),
        "lambdaFull": _s(it.lambda_full),
        "memberships": [
            {"label": "mu%d%d" % g, "value": _s(it.memberships[g])} for g in order
        ],
        "objectives": [
            {"label": goal_label(g), "value": _s(it.objective_values[g])} for g in order
        ],
        "multipleOptima": it.multiple_optima,
    }


def create_app(state_dir: Optional[str] = None, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="dblfgp")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, _Entry] = {}
    registry_lock = threading.Lock()
    store = Path(state_dir) if state_dir else None

    if store is not None:
        store.mkdir(parents=True, exist_ok=True)
        for path in sorted(store.glob("*.session")):
            try:
                state = parse_session(path.read_text())
            except (ParseError, ValueError):
                continue  # unreadable session files are skipped, not fatal
            sessions[path.stem] = _Entry(state, threading.Lock())

    def _persist(sid: str, state: SessionState) -> None:
        if store is not None:
            (store / f"{sid}.session").write_text(serialize_session(state))

    def _entry(sid: str) -> _Entry:
        entry = sessions.get(sid)
        if entry is None:
            raise _ApiError(404, "not_found", f"unknown session {sid}")
        return entry

    @app.exception_handler(_ApiError)
    async def _api_error(_, exc: _ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.get("/sessions")
    def list_sessions():
        with registry_lock:
            items = [
                {
                    "id": sid,
                    "status": e.state.status.value,
                    "iterations": str(len(e.state.history)),
                    "name": e.state.name,
                }
                for sid, e in sorted(sessions.items())
            ]
        return {"sessions": items}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        text = payload.get("document")
        if not isinstance(text, str):
            raise _ApiError(422, "bad_request", "body must carry a 'document' string")
        try:
            doc = parse_document(text)
        except ParseError as exc:
            raise _ApiError(422, "parse_error", str(exc))
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", GoalAspirationWarning)
                state = start_session(doc.problem, doc.goal_overrides, doc.comparisons, doc.name)
        except (StructuralError, ModelError, DegenerateGoalError) as exc:
            raise _ApiError(422, "invalid_problem", str(exc))
        sid = uuid.uuid4().hex
        with registry_lock:
            sessions[sid] = _Entry(state, threading.Lock())
        _persist(sid, state)
        return _summary(sid, state)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return _summary(sid, _entry(sid).state)

    @app.get("/sessions/{sid}/payoff")
    def get_payoff(sid: str):
        state = _entry(sid).state
        return {
            "rows": [
                {
                    "label": row.label,
                    "dm": str(row.goal_id[0]),
                    "index": str(row.goal_id[1]),
                    "sense": row.sense.value,
                    "min": _s(row.min_value),
                    "max": _s(row.max_value),
                    "argmin": _vec(row.argmin),
                    "argmax": _vec(row.argmax),
                }
                for row in state.payoff.rows
            ]
        }

    @app.post("/sessions/{sid}/solve")
    def solve(sid: str):
        entry = _entry(sid)
        with entry.lock:
            try:
                it = compute_candidate(entry.state)
            except InvalidStateError as exc:
                raise _ApiError(409, "wrong_state", str(exc))
            _persist(sid, entry.state)
            return _iteration_view(entry.state, it)

    @app.post("/sessions/{sid}/verdict")
    def verdict(sid: str, payload: dict = Body(...)):
        entry = _entry(sid)
        action = payload.get("action")
        if action == "accept":
            v = Accept()
        elif action == "revise":
            changes = {}
            for ch in payload.get("changes", []):
                try:
                    gid = (int(ch["dm"]), int(ch["index"]))
                except (KeyError, TypeError, ValueError):
                    raise _ApiError(422, "bad_request", "each change needs dm and index")
                tol = ch.get("tolerance")
                weight = ch.get("weight")
                try:
                    changes[gid] = GoalOverride(
                        tolerance_limit=float(tol) if tol is not None else None,
                        weight=float(weight) if weight is not None else None,
                    )
                except ValueError:
                    raise _ApiError(422, "bad_request", f"bad number in change for {gid}")
            if not changes:
                raise _ApiError(422, "bad_request", "revise verdict carries no changes")
            v = Revise(changes)
        else:
            raise _ApiError(422, "bad_request", "action must be 'accept' or 'revise'")
        with entry.lock:
            try:
                submit_verdict(entry.state, v)
            except InvalidStateError as exc:
                raise _ApiError(409, "wrong_state", str(exc))
            except RevisionError as exc:
                raise _ApiError(422, "bad_revision", str(exc))
            _persist(sid, entry.state)
            return _summary(sid, entry.state)

    @app.get("/sessions/{sid}/iterations")
    def iterations(sid: str):
        state = _entry(sid).state
        return {"iterations": [_iteration_view(state, it) for it in state.history]}

    @app.get("/sessions/{sid}/report")
    def get_report(sid: str, format: str = "json"):
        state = _entry(sid).state
        try:
            rep = report(state)
        except ModelError as exc:
            raise _ApiError(409, "no_iterations", str(exc))
        if format == "json":
            from .probfile import _report_rows

            rows = []
            for row in _report_rows(rep):
                enc = dict(row)
                for key in ("x", "memberships", "objectives"):
                    if key in enc:
                        enc[key] = _vec(enc[key])
                for key in ("lambdaUpper", "lambdaFull", "upperMembershipSum"):
                    if key in enc:
                        enc[key] = _s(enc[key])
                rows.append(enc)
            return {
                "name": rep.name,
                "status": rep.status.value,
                "varNames": list(rep.var_names),
                "goalLabels": list(rep.goal_labels),
                "rows": rows,
            }
        if format in ("text", "csv"):
            media = "text/plain" if format == "text" else "text/csv"
            return Response(content=render_report(rep, format), media_type=media)
        raise _ApiError(422, "bad_request", f"unknown report format {format!r}")

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
