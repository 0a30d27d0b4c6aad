"""Human-as-oracle sessions over HTTP.

A session runs a solver whose compare calls suspend into pairwise
queries. The only persistent state is the journal (the spec plus the
answer sequence): solvers are deterministic given the seed, so replaying
the journal from scratch reconstructs the exact solver state. That one
invariant gives resume-after-crash and undo for free; serving the next
query is just "replay all answers, catch the next comparison".

Wire protocol (JSON over HTTP):
  POST /sessions {spec}                      -> {"session_id": ...}
  GET  /sessions/{id}/query                  -> pending ComparisonQuery
  POST /sessions/{id}/answer {query_id, preference} -> session state
  POST /sessions/{id}/undo                   -> session state
  GET  /sessions/{id}/trace                  -> accepted-iterate trajectory
Preference mapping is bit-exact: "A" means candidate A is better, i.e.
compare(A, B) = -1; "B" means +1; "TIE" means 0.
"""
from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .core import CoordinateSmoothness, as_vector
from .oracle import Sign3
from .solvers import (SolverConfig, SolverTrace, Square2D, order_acdm,
                      order_rcd, square_halving_2d)

PREFERENCE_TO_SIGN = {"A": -1, "B": 1, "TIE": 0}

SESSION_SOLVERS = ("order_rcd", "order_acdm", "square_halving_2d")


class ParameterModel(BaseModel):
    name: str
    lower: float
    upper: float


class SessionSpecModel(BaseModel):
    """Validated session request: labeled box, solver choice, budget."""

    parameters: list[ParameterModel] = Field(min_length=1)
    solver: str = "order_rcd"
    query_budget: int = Field(default=200, ge=1)
    seed: int = 0
    max_iterations: int = 50
    ls_tol: float = 0.05  # fraction of the parameter range per coordinate
    alpha: float = 0.0
    mu: float = 0.0
    acdm_second_search: bool = False
    eps: float = 1e-3  # square-halving target accuracy (parameter units)

    def model_post_init(self, _ctx):
        if self.solver not in SESSION_SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}")
        for p in self.parameters:
            if not p.lower < p.upper:
                raise ValueError(f"parameter {p.name!r}: lower must be < upper")
        if self.solver == "square_halving_2d" and len(self.parameters) != 2:
            raise ValueError("square_halving_2d needs exactly 2 parameters")
        if self.solver == "order_acdm" and self.mu <= 0:
            raise ValueError("order_acdm needs a positive mu")


class PendingComparison(Exception):
    """Raised by the replay oracle when it runs out of recorded answers."""

    def __init__(self, x: np.ndarray, y: np.ndarray, index: int):
        super().__init__(f"comparison #{index} awaits a human answer")
        self.x = x.copy()
        self.y = y.copy()
        self.index = index


class ReplayOracle:
    """Order oracle fed from a recorded answer sequence.

    Replays journal answers in order; the first unanswered compare
    raises PendingComparison carrying the two candidate points.
    """

    def __init__(self, dim: int, answers: list[Sign3]):
        self.dim = dim
        self.answers = answers
        self._calls = 0

    @property
    def calls(self) -> int:
        return self._calls

    def compare(self, x, y) -> Sign3:
        x = as_vector(x, self.dim)
        y = as_vector(y, self.dim)
        if self._calls >= len(self.answers):
            raise PendingComparison(x, y, self._calls)
        s = self.answers[self._calls]
        self._calls += 1
        return s


@dataclass
class DriveResult:
    status: str  # "awaiting" | "terminal"
    trace: SolverTrace
    pending: PendingComparison | None


def drive_solver(spec: SessionSpecModel, answers: list[Sign3]) -> DriveResult:
    """Replay the whole session from its spec and answer sequence."""
    d = len(spec.parameters)
    lowers = np.array([p.lower for p in spec.parameters])
    uppers = np.array([p.upper for p in spec.parameters])
    x0 = (lowers + uppers) / 2.0
    oracle = ReplayOracle(d, answers)
    trace = SolverTrace(seed=spec.seed, keep_iterates=True)
    regions: list = []
    tol = float(np.min(uppers - lowers)) * spec.ls_tol
    cfg = SolverConfig(max_iterations=spec.max_iterations, ls_tol=tol,
                       seed=spec.seed, mu=spec.mu or 0.0,
                       acdm_second_search=spec.acdm_second_search,
                       bounds=[(lo, hi) for lo, hi in zip(lowers, uppers)])
    try:
        if spec.solver == "order_rcd":
            s = CoordinateSmoothness(np.ones(d), spec.alpha)
            order_rcd(oracle, s, x0, cfg, trace_out=trace)
        elif spec.solver == "order_acdm":
            s = CoordinateSmoothness(np.ones(d), spec.alpha)
            order_acdm(oracle, s, x0, cfg, trace_out=trace)
        else:
            half = float(np.min((uppers - lowers) / 2.0))
            res = square_halving_2d(oracle, Square2D(tuple(x0), half),
                                    eps=spec.eps, inner_tol=tol,
                                    rounds=spec.max_iterations,
                                    regions_out=regions)
            _regions_into_trace(trace, regions, final=res.point)
        return DriveResult("terminal", trace, None)
    except PendingComparison as pc:
        if spec.solver == "square_halving_2d":
            _regions_into_trace(trace, regions)
        if pc.index >= spec.query_budget:
            return DriveResult("terminal", trace, None)
        return DriveResult("awaiting", trace, pc)


def _regions_into_trace(trace: SolverTrace, regions, final=None):
    # square-halving rounds mapped onto the common trace layout; the
    # round index doubles as the cost column
    for k, (cx, cy, _, _) in enumerate(regions):
        trace.record(k, k, np.array([cx, cy]), None)
    if final is not None:
        trace.finish(np.asarray(final))
    elif regions:
        trace.x_final = np.array([regions[-1][0], regions[-1][1]])


class Session:
    """One live optimization: a spec, a journal file, and a lock."""

    def __init__(self, session_id: str, spec: SessionSpecModel,
                 journal_path: Path):
        self.id = session_id
        self.spec = spec
        self.journal_path = journal_path
        self.answers: list[Sign3] = []
        self.lock = threading.Lock()

    # -- journal ---------------------------------------------------------
    def journal_init(self):
        with self.journal_path.open("w") as fh:
            fh.write(json.dumps({"type": "spec", "session_id": self.id,
                                 "spec": self.spec.model_dump()}) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def journal_append(self, query_id: str, sign: Sign3):
        with self.journal_path.open("a") as fh:
            fh.write(json.dumps({"type": "answer", "query_id": query_id,
                                 "sign": sign, "ts": time.time()}) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def journal_truncate_last(self):
        lines = self.journal_path.read_text().splitlines()
        if len(lines) <= 1:
            raise ValueError("nothing to undo")
        with self.journal_path.open("w") as fh:
            fh.write("\n".join(lines[:-1]) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    @classmethod
    def load(cls, session_id: str, journal_path: Path) -> "Session":
        lines = journal_path.read_text().splitlines()
        head = json.loads(lines[0])
        if head.get("type") != "spec":
            raise ValueError(f"corrupt journal {journal_path}")
        sess = cls(session_id, SessionSpecModel(**head["spec"]), journal_path)
        for line in lines[1:]:
            rec = json.loads(line)
            if rec.get("type") == "answer":
                sess.answers.append(int(rec["sign"]))
        return sess

    # -- derived state ---------------------------------------------------
    def drive(self) -> DriveResult:
        return drive_solver(self.spec, self.answers)

    def pending_query_id(self) -> str:
        return f"q{len(self.answers)}"

    def render_candidate(self, v: np.ndarray) -> dict:
        values = {p.name: float(x) for p, x in zip(self.spec.parameters, v)}
        return {"values": values, "vector": [float(x) for x in v]}

    def query_payload(self, pc: PendingComparison) -> dict:
        return {
            "query_id": f"q{pc.index}",
            "candidate_a": self.render_candidate(pc.x),
            "candidate_b": self.render_candidate(pc.y),
            "issued_at": time.time(),
        }

    def state_payload(self, drive: DriveResult) -> dict:
        best = drive.trace.iterates[-1] if drive.trace.iterates else None
        return {
            "session_id": self.id,
            "status": drive.status,
            "iteration": drive.trace.iterations[-1] if drive.trace.iterations else 0,
            "queries_used": len(self.answers),
            "query_budget": self.spec.query_budget,
            "best": self.render_candidate(best) if best is not None else None,
            "pending": self.query_payload(drive.pending)
            if drive.pending is not None else None,
        }

    def trace_payload(self, drive: DriveResult) -> dict:
        return {
            "session_id": self.id,
            "iterations": list(drive.trace.iterations),
            "oracle_calls": list(drive.trace.oracle_calls),
            "candidates": [[float(v) for v in x]
                           for x in (drive.trace.iterates or [])],
        }


class SessionStore:
    """Disk-backed session registry; journals live under one directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def create(self, spec: SessionSpecModel) -> Session:
        session_id = uuid.uuid4().hex[:12]
        sess = Session(session_id, spec, self._path(session_id))
        sess.journal_init()
        with self._lock:
            self._sessions[session_id] = sess
        return sess

    def get(self, session_id: str) -> Session:
        with self._lock:
            sess = self._sessions.get(session_id)
            if sess is None:
                path = self._path(session_id)
                if not path.exists():
                    raise KeyError(session_id)
                sess = Session.load(session_id, path)
                self._sessions[session_id] = sess
        return sess


class AnswerModel(BaseModel):
    query_id: str
    preference: str

    def model_post_init(self, _ctx):
        if self.preference not in PREFERENCE_TO_SIGN:
            raise ValueError("preference must be one of A, B, TIE")


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="orderopt live sessions")

    def _get(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(404, f"no session {session_id!r}")

    @app.post("/sessions")
    def create_session(spec: SessionSpecModel):
        sess = store.create(spec)
        with sess.lock:
            return {"session_id": sess.id, **sess.state_payload(sess.drive())}

    @app.get("/sessions/{session_id}/query")
    def next_query(session_id: str):
        sess = _get(session_id)
        with sess.lock:
            drive = sess.drive()
            if drive.pending is None:
                return {"status": "terminal", **sess.state_payload(drive)}
            return sess.query_payload(drive.pending)

    @app.post("/sessions/{session_id}/answer")
    def submit_answer(session_id: str, answer: AnswerModel):
        sess = _get(session_id)
        with sess.lock:
            drive = sess.drive()
            if drive.pending is None:
                raise HTTPException(409, "session is terminal")
            expected = sess.pending_query_id()
            if answer.query_id != expected:
                raise HTTPException(
                    409, f"stale query_id {answer.query_id!r}; "
                         f"pending is {expected!r}")
            sign = PREFERENCE_TO_SIGN[answer.preference]
            sess.journal_append(expected, sign)
            sess.answers.append(sign)
            return sess.state_payload(sess.drive())

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        sess = _get(session_id)
        with sess.lock:
            if not sess.answers:
                raise HTTPException(409, "nothing to undo")
            sess.journal_truncate_last()
            sess.answers.pop()
            return sess.state_payload(sess.drive())

    @app.get("/sessions/{session_id}/trace")
    def trace(session_id: str):
        sess = _get(session_id)
        with sess.lock:
            return sess.trace_payload(sess.drive())

    return app


def main(argv=None) -> int:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="orderopt-serve",
                                     description="live preference-session service")
    parser.add_argument("--data-dir", default="./sessions")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    app = create_app(SessionStore(args.data_dir))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    main()
