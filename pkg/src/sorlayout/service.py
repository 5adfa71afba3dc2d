"""Session-oriented solving service for the interactive playground.

Speaks JSON messages with a ``type`` discriminator over a WebSocket
channel (``/ws``) and mirrors them as one-shot HTTP endpoints (``/load``,
``/resize``, ``/mutate``, ``/stats``). Each session owns a layout, the
last solution (the warm-start carrier), and a bounded ring of per-solve
stats. Resize messages arriving faster than solves complete are coalesced
so only the latest target is solved.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import random
import secrets
import threading
import time
from collections import deque
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .engine import SolverConfig
from .layout import (
    MIN_WINDOW,
    BelowMinimumError,
    LayoutSpec,
    generate_layout,
    layout_to_dict,
    perturb_constraints,
    resize,
)
from .resolver import solve_with_insertion
from .rng import derive_seed
from .system import Solution

MAX_AREAS = 500
SESSION_TTL_S = 600.0
STATS_RING = 256
DEFAULT_SESSION_CAP = 128


class ServiceError(Exception):
    code = "bad_request"
    http_status = 400

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class BadRequestError(ServiceError):
    code = "bad_request"
    http_status = 400


class LimitExceededError(ServiceError):
    code = "limit_exceeded"
    http_status = 400


class UnknownSessionError(ServiceError):
    code = "unknown_session"
    http_status = 404


class BelowMinimumRequestError(ServiceError):
    code = "below_minimum"
    http_status = 400


@dataclass
class Session:
    id: str
    layout: LayoutSpec
    config: SolverConfig
    last_solution: Solution
    mutation_rng: random.Random
    stats: deque = field(default_factory=lambda: deque(maxlen=STATS_RING))
    last_access: float = field(default_factory=time.monotonic)


@dataclass
class Settings:
    session_cap: int = DEFAULT_SESSION_CAP
    default_omega: float = 0.7
    default_tolerance: float = 0.01
    max_iterations: int = 1000


SETTINGS = Settings()


class SessionStore:
    """Thread-safe session table with lazy TTL expiry."""

    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _purge(self) -> None:
        now = time.monotonic()
        dead = [
            sid
            for sid, s in self._sessions.items()
            if now - s.last_access > SESSION_TTL_S
        ]
        for sid in dead:
            del self._sessions[sid]

    def create(self, session: Session) -> None:
        with self._lock:
            self._purge()
            if len(self._sessions) >= SETTINGS.session_cap:
                raise LimitExceededError("session cap reached")
            self._sessions[session.id] = session

    def get(self, session_id) -> Session:
        if not isinstance(session_id, str) or not session_id:
            raise BadRequestError("missing session id")
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSessionError(f"no session {session_id!r}")
            session.last_access = time.monotonic()
            return session

    def clear(self) -> None:
        with self._lock:
            self._sessions.clear()


SESSIONS = SessionStore()


def _area_rects(layout: LayoutSpec, solution: Solution) -> list[dict]:
    values = solution.values
    return [
        {
            "left": float(values[a.left]),
            "top": float(values[a.top]),
            "right": float(values[a.right]),
            "bottom": float(values[a.bottom]),
        }
        for a in layout.areas
    ]


def _solve_session(session: Session, warm: bool) -> dict:
    """Run one insertion solve, update session state, return its stats."""
    system = session.layout.system
    start = (
        session.last_solution
        if warm
        else Solution.zeros(system.variable_count)
    )
    resolved = solve_with_insertion(system, start, session.config)
    session.last_solution = resolved.solution
    stats = {
        "sweeps": resolved.total_sweeps,
        "attempts": resolved.attempt_count,
        "time_ns": resolved.wall_time_ns,
        "warm": warm,
        "disabled": list(resolved.disabled),
    }
    session.stats.append(stats)
    return stats


def _solution_message(session: Session, stats: dict) -> dict:
    layout = session.layout
    return {
        "type": "solution",
        "values": [float(v) for v in session.last_solution.values],
        "areas": _area_rects(layout, session.last_solution),
        "width": layout.width,
        "height": layout.height,
        "stats": stats,
    }


def _require_number(params: dict, key: str) -> float:
    value = params.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise BadRequestError(f"field {key!r} must be a number")
    return float(value)


def handle_load(params: dict) -> dict:
    n_areas = params.get("n_areas", params.get("areas"))
    if not isinstance(n_areas, int) or isinstance(n_areas, bool) or n_areas < 0:
        raise BadRequestError("field 'n_areas' must be a non-negative integer")
    if n_areas > MAX_AREAS:
        raise LimitExceededError(f"n_areas is capped at {MAX_AREAS}")
    width = float(params.get("width", 800))
    height = float(params.get("height", 600))
    if width < MIN_WINDOW or height < MIN_WINDOW:
        raise BelowMinimumRequestError(
            f"window must be at least {MIN_WINDOW}x{MIN_WINDOW} px"
        )
    seed = params.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise BadRequestError("field 'seed' must be a non-negative integer")
    omega = float(params.get("omega", SETTINGS.default_omega))
    tolerance = float(params.get("tolerance", SETTINGS.default_tolerance))
    try:
        config = SolverConfig(
            omega=omega,
            tolerance=tolerance,
            max_iterations=SETTINGS.max_iterations,
            seed=seed,
        )
    except ValueError as exc:
        raise BadRequestError(str(exc)) from None

    layout = generate_layout(n_areas, width, height, seed)
    session = Session(
        id=secrets.token_hex(16),
        layout=layout,
        config=config,
        last_solution=Solution.zeros(layout.system.variable_count),
        mutation_rng=random.Random(derive_seed(seed, 0x6D75)),
    )
    stats = _solve_session(session, warm=False)
    SESSIONS.create(session)
    message = _solution_message(session, stats)
    message["type"] = "loaded"
    message["session"] = session.id
    message["layout"] = layout_to_dict(layout)
    return message


def handle_resize(params: dict) -> dict:
    session = SESSIONS.get(params.get("session"))
    width = _require_number(params, "width")
    height = _require_number(params, "height")
    warm = params.get("warm", True)
    if not isinstance(warm, bool):
        raise BadRequestError("field 'warm' must be a boolean")
    try:
        resize(session.layout, width, height)
    except BelowMinimumError as exc:
        raise BelowMinimumRequestError(str(exc)) from None
    stats = _solve_session(session, warm=warm)
    return _solution_message(session, stats)


def handle_mutate(params: dict) -> dict:
    session = SESSIONS.get(params.get("session"))
    fraction = _require_number(params, "fraction")
    if not 0.0 < fraction <= 1.0:
        raise BadRequestError("field 'fraction' must lie in (0, 1]")
    changed = perturb_constraints(session.layout, fraction, session.mutation_rng)
    if changed:
        stats = _solve_session(session, warm=True)
    else:
        # Nothing was perturbed: the current solution stands as-is.
        stats = {
            "sweeps": 0,
            "attempts": 0,
            "time_ns": 0,
            "warm": True,
            "disabled": [],
        }
        session.stats.append(stats)
    message = _solution_message(session, stats)
    message["changed"] = changed
    return message


def handle_stats(params: dict) -> dict:
    session = SESSIONS.get(params.get("session"))
    return {"type": "stats", "history": list(session.stats)}


_HANDLERS = {
    "load": handle_load,
    "resize": handle_resize,
    "mutate": handle_mutate,
    "stats": handle_stats,
}


def dispatch(message: dict) -> dict:
    kind = message.get("type")
    handler = _HANDLERS.get(kind)
    if handler is None:
        raise BadRequestError(f"unknown message type {kind!r}")
    return handler(message)


def _error_message(exc: ServiceError) -> dict:
    return {"type": "error", "error": exc.code, "message": exc.message}


app = FastAPI(title="sorlayout solver service")


@app.get("/health")
def health() -> dict:
    return {"ok": True}


def _http_endpoint(kind: str, body: dict) -> JSONResponse:
    message = dict(body or {})
    message["type"] = kind
    try:
        return JSONResponse(dispatch(message))
    except ServiceError as exc:
        return JSONResponse(_error_message(exc), status_code=exc.http_status)


@app.post("/load")
def http_load(body: dict) -> JSONResponse:
    return _http_endpoint("load", body)


@app.post("/resize")
def http_resize(body: dict) -> JSONResponse:
    return _http_endpoint("resize", body)


@app.post("/mutate")
def http_mutate(body: dict) -> JSONResponse:
    return _http_endpoint("mutate", body)


@app.post("/stats")
def http_stats(body: dict) -> JSONResponse:
    return _http_endpoint("stats", body)


@app.websocket("/ws")
async def ws_channel(ws: WebSocket) -> None:
    """Message channel with resize coalescing.

    Non-resize messages are answered in receive order. Resize targets are
    funneled through a single pending slot consumed by a worker task, so a
    burst of drags collapses to solving only the newest target.
    """
    await ws.accept()
    pending: list[dict] = []
    wakeup = asyncio.Event()
    send_lock = asyncio.Lock()

    async def send(payload: dict) -> None:
        async with send_lock:
            await ws.send_json(payload)

    async def run_message(message: dict) -> dict:
        try:
            return await asyncio.to_thread(dispatch, message)
        except ServiceError as exc:
            return _error_message(exc)

    async def resize_worker() -> None:
        while True:
            await wakeup.wait()
            wakeup.clear()
            while pending:
                message = pending.pop()
                pending.clear()  # drop stale targets
                await send(await run_message(message))

    worker = asyncio.create_task(resize_worker())
    try:
        while True:
            message = await ws.receive_json()
            if not isinstance(message, dict):
                await send(
                    {
                        "type": "error",
                        "error": "bad_request",
                        "message": "messages must be JSON objects",
                    }
                )
                continue
            if message.get("type") == "resize":
                pending.append(message)
                wakeup.set()
            else:
                await send(await run_message(message))
    except WebSocketDisconnect:
        pass
    finally:
        worker.cancel()


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return float(raw) if raw else default


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(
        prog="sorlayout-service",
        description="Serve the layout solver over HTTP and WebSocket.",
    )
    parser.add_argument("--host", default=os.environ.get("SORLAYOUT_HOST", "127.0.0.1"))
    parser.add_argument(
        "--port", type=int, default=_env_int("SORLAYOUT_PORT", 8000)
    )
    parser.add_argument(
        "--session-cap",
        type=int,
        default=_env_int("SORLAYOUT_SESSION_CAP", DEFAULT_SESSION_CAP),
    )
    parser.add_argument(
        "--omega", type=float, default=_env_float("SORLAYOUT_OMEGA", 0.7)
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=_env_float("SORLAYOUT_TOLERANCE", 0.01),
    )
    parser.add_argument(
        "--static",
        metavar="DIR",
        default=os.environ.get("SORLAYOUT_STATIC"),
        help="optionally serve a playground build from this directory",
    )
    args = parser.parse_args(argv)

    SETTINGS.session_cap = args.session_cap
    SETTINGS.default_omega = args.omega
    SETTINGS.default_tolerance = args.tolerance
    if args.static:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=args.static, html=True))

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
