"""Session-oriented HTTP facade over the debugging engine.

Protocol (JSON, UTF-8):

    POST   /sessions                    create from a config document
    GET    /sessions/{id}               read-only snapshot
    POST   /sessions/{id}/answer        {"answer": "yes"|"no", "round": k}
    DELETE /sessions/{id}

Answers are idempotent per round token; snapshots never reveal a hidden
simulated oracle target.
"""

from __future__ import annotations

import json
import secrets
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .diagnosis import Dpi
from .formulas import KBError, parse_kb
from .queries import NO, YES
from .session import Session, SessionConfig, SessionError
from .strategy import CautiousnessParams


class _Entry:
    def __init__(self, session: Session, hidden_target):
        self.session = session
        self.lock = threading.Lock()
        self.hidden_target = hidden_target
        self.answered: dict[int, str] = {}


def _error(code: int, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=code)


def _snapshot(sid: str, entry: _Entry) -> dict:
    s = entry.session
    kb = s.dpi.kb
    status = "finished" if s.finished else "awaiting-answer"
    diagnoses = sorted(
        ({"ids": list(kb.sort_ids(d.ids)), "posterior": d.posterior} for d in s.leading),
        key=lambda d: (-d["posterior"], d["ids"]),
    )
    history = [
        {"literals": sorted(str(l) for l in h.literals), "answer": h.answer}
        for h in s.beliefs.history
    ]
    return {
        "id": sid,
        "status": status,
        "round": len(s.beliefs.history),
        "query": None if s.pending is None else {
            "literals": sorted(str(l) for l in s.pending.literals)
        },
        "diagnoses": diagnoses,
        "cautiousness": {
            "c": s.cp.c,
            "c_min": s.cp.c_min,
            "c_max": s.cp.c_max,
        },
        "history": history,
        "result": list(kb.sort_ids(s.result.ids)) if s.finished else None,
    }


def create_app(transcript_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="kbdebug")
    store: dict[str, _Entry] = {}
    store_lock = threading.Lock()

    def build_config(doc: dict) -> tuple[SessionConfig, frozenset | None]:
        kb_text = doc.get("kb")
        if not isinstance(kb_text, str):
            raise ValueError("config must carry the KB file content under 'kb'")
        kb = parse_kb(kb_text)
        cfg = SessionConfig(
            dpi=Dpi(kb),
            strategy=doc.get("strategy", "entropy"),
            n=int(doc.get("n", 9)),
            sigma=float(doc.get("sigma", 85.0)),
            cautiousness=CautiousnessParams(
                c=float(doc.get("c", 0.25)),
                c_min=float(doc.get("c_min", 0.0)),
                c_max=float(doc.get("c_max", 0.5)),
                epsilon=float(doc.get("epsilon", 0.25)),
            ),
            stop_mode=doc.get("stop", "singleton"),
        )
        target = doc.get("oracle_target")
        if target is not None:
            target = frozenset(target)
            unknown = target - set(kb.by_id)
            if unknown:
                raise ValueError(f"oracle target references unknown axioms: {sorted(unknown)}")
        return cfg, target

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            doc = await request.json()
        except json.JSONDecodeError:
            return _error(400, "request body is not valid JSON")
        try:
            cfg, target = build_config(doc)
        except (ValueError, KBError, TypeError) as exc:
            return _error(400, str(exc))
        try:
            session = Session(cfg)
        except SessionError as exc:
            return _error(422, str(exc))
        sid = secrets.token_urlsafe(16)
        with store_lock:
            store[sid] = _Entry(session, target)
        return JSONResponse(_snapshot(sid, store[sid]), status_code=201)

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        entry = store.get(sid)
        if entry is None:
            return _error(404, "unknown session id")
        with entry.lock:
            return _snapshot(sid, entry)

    @app.post("/sessions/{sid}/answer")
    async def post_answer(sid: str, request: Request):
        entry = store.get(sid)
        if entry is None:
            return _error(404, "unknown session id")
        try:
            doc = await request.json()
        except json.JSONDecodeError:
            return _error(400, "request body is not valid JSON")
        answer = doc.get("answer")
        rnd = doc.get("round")
        if answer not in (YES, NO) or not isinstance(rnd, int):
            return _error(400, "need {'answer': 'yes'|'no', 'round': k}")
        with entry.lock:
            session = entry.session
            current = len(session.beliefs.history)
            if rnd in entry.answered:
                if entry.answered[rnd] == answer:
                    return _snapshot(sid, entry)  # duplicate POST: idempotent
                return _error(409, f"round {rnd} already answered differently")
            if session.finished or rnd != current:
                return _error(409, "session is not awaiting an answer for this round")
            session.submit_answer(answer)
            entry.answered[rnd] = answer
            if session.finished and transcript_dir:
                path = Path(transcript_dir) / f"{sid}.json"
                path.write_text(session.transcript_json(), encoding="utf-8")
            return _snapshot(sid, entry)

    @app.delete("/sessions/{sid}")
    async def delete_session(sid: str):
        with store_lock:
            entry = store.pop(sid, None)
        if entry is None:
            return _error(404, "unknown session id")
        return {"deleted": sid}

    return app
