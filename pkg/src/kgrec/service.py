"""JSON-over-HTTP session API for the interview, with durable persistence.

Persistence is an append-only newline-delimited JSON log: session creations
and answer batches are written (and flushed to disk) before any response is
sent, so a restart replays the log through the interview engine and
reconstructs every acknowledged state. Answer posts are idempotent per
(session, batch number).
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .graph import load_graph
from .interview import (
    BatchMismatch,
    InterviewConfig,
    InterviewEngine,
    InterviewError,
    InterviewExhausted,
    InterviewSession,
    Phase,
)
from .sampling import load_popularity


class AnswerItem(BaseModel):
    entity_id: int
    sentiment: int = Field(ge=-1, le=1)


class AnswersPayload(BaseModel):
    batch_number: int
    answers: list[AnswerItem]


class CreatePayload(BaseModel):
    token: str | None = None


class SessionHub:
    """Owns sessions, per-session locks, the write-ahead log, and recovery."""

    def __init__(self, engine: InterviewEngine, data_dir: str | Path):
        self.engine = engine
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / "answers.ndjson"
        self.sessions: dict[str, InterviewSession] = {}
        self.responses: dict[tuple[str, int], dict] = {}
        self.token_history: dict[str, set[int]] = {}
        self.open_session_by_token: dict[str, str] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global = threading.Lock()
        self._log_lock = threading.Lock()
        self._recover()

    # -- persistence -------------------------------------------------------

    def _append(self, record: dict) -> None:
        with self._log_lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def _recover(self) -> None:
        if not self.log_path.exists():
            return
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec["type"] == "session":
                    self._start_session(
                        rec["token"], rec["seed"], rec["session_id"], replay=True
                    )
                elif rec["type"] == "answers":
                    session = self.sessions[rec["session_id"]]
                    answers = [(int(e), int(s)) for e, s in rec["answers"]]
                    self.engine.submit_batch(session, answers)
                    self._after_submit(session, rec["batch_number"], log=False)

    # -- session lifecycle ---------------------------------------------------

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._global:
            return self._locks.setdefault(session_id, threading.Lock())

    def _start_session(self, token: str, seed: int, session_id: str, replay: bool = False) -> InterviewSession:
        exclude = frozenset(self.token_history.get(token, set()))
        session = self.engine.new_session(token, seed, exclude=exclude, session_id=session_id)
        self.sessions[session.session_id] = session
        self.open_session_by_token[token] = session.session_id
        if not replay:
            self._append(
                {"type": "session", "session_id": session.session_id, "token": token,
                 "seed": seed, "ts": time.time()}
            )
        return session

    def create_or_resume(self, token: str | None) -> tuple[InterviewSession, bool]:
        with self._global:
            if token is None:
                token = secrets.token_hex(16)  # 128-bit browser token
            open_id = self.open_session_by_token.get(token)
            if open_id is not None:
                session = self.sessions[open_id]
                if session.phase != Phase.DONE:
                    return session, True
            seed = int.from_bytes(secrets.token_bytes(4), "big")
            session = self._start_session(token, seed, secrets.token_hex(12))
            return session, False

    def _after_submit(self, session: InterviewSession, batch_number: int, log: bool) -> None:
        if session.phase == Phase.DONE:
            self.token_history.setdefault(session.token, set()).update(session.asked)
            self.open_session_by_token.pop(session.token, None)

    def submit(self, session: InterviewSession, payload: AnswersPayload) -> dict:
        key = (session.session_id, payload.batch_number)
        if key in self.responses:
            return self.responses[key]
        if payload.batch_number != session.batch_number:
            raise HTTPException(409, "batch number does not match the pending batch")
        answers = [(a.entity_id, a.sentiment) for a in payload.answers]
        # write-ahead: the log record is durable before we mutate and respond
        self._append(
            {"type": "answers", "session_id": session.session_id,
             "batch_number": payload.batch_number, "answers": answers,
             "token": session.token, "ts": time.time()}
        )
        try:
            self.engine.submit_batch(session, answers)
        except BatchMismatch as exc:
            raise HTTPException(409, str(exc)) from exc
        except InterviewError as exc:
            raise HTTPException(409, str(exc)) from exc
        self._after_submit(session, payload.batch_number, log=True)
        response = self.describe(session)
        self.responses[key] = response
        return response

    # -- payload rendering -----------------------------------------------------

    def entity_payload(self, entity_id: int) -> dict:
        e = self.engine.graph.entity(entity_id)
        return {
            "id": e.id,
            "uri": e.uri,
            "name": e.name,
            "kind": e.kind,
            "recommendable": e.recommendable,
        }

    def describe(self, session: InterviewSession) -> dict:
        cfg = self.engine.config
        out = {
            "session_id": session.session_id,
            "token": session.token,
            "phase": session.phase.value,
            "batch_number": session.batch_number,
            "progress": min(session.binary_count, cfg.binary_target),
            "progress_target": cfg.binary_target,
            "truncated": session.truncated,
            "batch": [self.entity_payload(e) for e in session.pending_batch],
        }
        if session.phase in (Phase.RECOMMENDATION, Phase.DONE) and session.final:
            liked, disliked, extras = session.final
            out["final"] = {
                "predicted_liked": [self.entity_payload(e) for e in liked],
                "predicted_disliked": [self.entity_payload(e) for e in disliked],
                "extras": [self.entity_payload(e) for e in extras],
            }
        return out

    def export_rows(self, since: float | None = None) -> list[tuple[str, str, bool, int]]:
        rows = []
        seen = set()
        if not self.log_path.exists():
            return rows
        graph = self.engine.graph
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec["type"] != "answers":
                    continue
                if since is not None and rec.get("ts", 0) < since:
                    continue
                for entity_id, sentiment in rec["answers"]:
                    key = (rec["token"], entity_id)
                    if key in seen:
                        continue
                    seen.add(key)
                    rows.append(
                        (
                            rec["token"],
                            str(graph.uris[entity_id]),
                            bool(graph.recommendable_mask[entity_id]),
                            int(sentiment),
                        )
                    )
        rows.sort(key=lambda r: (r[0], r[1]))
        return rows


def create_app(
    entities: str | Path | None = None,
    triples: str | Path | None = None,
    relations: str | Path | None = None,
    popularity: str | Path | None = None,
    data_dir: str | Path = "service-data",
    static_dir: str | Path | None = None,
    engine: InterviewEngine | None = None,
    interview_config: InterviewConfig | None = None,
) -> FastAPI:
    app = FastAPI(title="kgrec interview service")
    hub: SessionHub | None = None

    if engine is None and entities is not None:
        graph = load_graph(entities, triples, relations)
        pop = load_popularity(popularity, graph)
        engine = InterviewEngine(graph, pop, interview_config)
    if engine is not None:
        hub = SessionHub(engine, data_dir)
    app.state.hub = hub

    def need_hub() -> SessionHub:
        if app.state.hub is None:
            raise HTTPException(503, "dataset not loaded")
        return app.state.hub

    @app.post("/api/sessions")
    def create_session(payload: CreatePayload | None = None):
        hub = need_hub()
        token = payload.token if payload else None
        try:
            session, resumed = hub.create_or_resume(token)
        except InterviewExhausted as exc:
            raise HTTPException(409, str(exc)) from exc
        out = hub.describe(session)
        out["resumed"] = resumed
        return out

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        hub = need_hub()
        session = hub.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, "unknown session")
        return hub.describe(session)

    @app.post("/api/sessions/{session_id}/answers")
    def post_answers(session_id: str, payload: AnswersPayload):
        hub = need_hub()
        session = hub.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, "unknown session")
        with hub.lock_for(session_id):
            if session.phase == Phase.DONE and (session_id, payload.batch_number) not in hub.responses:
                raise HTTPException(410, "session is done")
            return hub.submit(session, payload)

    @app.get("/api/export")
    def export(since: float | None = Query(default=None)):
        hub = need_hub()
        rows = hub.export_rows(since)
        body = "user_id,entity_uri,is_item,sentiment\n" + "".join(
            f"{u},{uri},{'true' if item else 'false'},{s}\n" for u, uri, item, s in rows
        )
        return PlainTextResponse(body, media_type="text/csv")

    if static_dir is not None and Path(static_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
