"""Wire service driving interactive audits for the companion UI.

Snapshot-scoped and stateless per request beyond the in-memory session
store. Payloads reuse the canonical enum labels; the client performs no
rule evaluation of its own — it renders whatever the next-step resource
says. Bogus-friend questionnaire payloads are indistinguishable from real
ones by design.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from friendaudit.domain import (
    AgreementAnswer,
    FrequencyAnswer,
    FriendAuditError,
    IgnoreReason,
    ResponseSet,
)
from friendaudit.features import SocialSnapshot
from friendaudit.session import (
    AuditSession,
    COMPATIBLE_DECISIONS,
    DuplicateSubmissionError,
    IncompatibleDecisionError,
    MissingIgnoreReasonError,
    NoPendingSuggestionError,
    OutOfOrderError,
    SessionConfig,
    SessionIncompleteError,
    SessionMode,
    SessionStatus,
    TooFewFriendsError,
    build_decision,
    create_session,
)

QUESTION_TEXT = {
    1: "How often do you interact with this friend online?",
    2: "How often do you interact with this friend in real life?",
    3: "This friend might misuse a sensitive photo that you upload.",
    4: "This friend might abuse a status update that you post.",
    5: "This friend might post offensive, misleading, false or malicious content.",
}

FREQUENCY_LABELS = [a.value for a in FrequencyAnswer]
AGREEMENT_LABELS = [a.value for a in AgreementAnswer]
IGNORE_REASON_LABELS = [r.value for r in IgnoreReason]


class ApiError(Exception):
    STATUS = {"BadRequest": 400, "NotFound": 404, "Conflict": 409, "Invariant": 500}

    def __init__(self, code: str, message: str, detail: dict | None = None) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail

    @property
    def http_status(self) -> int:
        return self.STATUS[self.code]

    def payload(self) -> dict:
        body = {"code": self.code, "message": self.message}
        if self.detail is not None:
            body["detail"] = self.detail
        return body


_CONFLICTS = (OutOfOrderError, DuplicateSubmissionError, NoPendingSuggestionError)


def _to_api_error(exc: Exception) -> ApiError:
    if isinstance(exc, _CONFLICTS):
        return ApiError("Conflict", str(exc))
    if isinstance(exc, SessionIncompleteError):
        return ApiError("Conflict", str(exc))
    if isinstance(
        exc,
        (IncompatibleDecisionError, MissingIgnoreReasonError, TooFewFriendsError),
    ):
        return ApiError("BadRequest", str(exc))
    if isinstance(exc, (FriendAuditError, ValueError, KeyError)):
        return ApiError("BadRequest", str(exc))
    return ApiError("Invariant", str(exc))


@dataclass
class SessionStore:
    """Serializes operations per session; distinct sessions run in parallel."""

    sessions: dict[str, AuditSession] = field(default_factory=dict)
    locks: dict[str, threading.Lock] = field(default_factory=dict)
    _guard: threading.Lock = field(default_factory=threading.Lock)

    def add(self, session: AuditSession) -> None:
        with self._guard:
            self.sessions[session.session_id] = session
            self.locks[session.session_id] = threading.Lock()

    def get(self, session_id: str) -> tuple[AuditSession, threading.Lock]:
        with self._guard:
            if session_id not in self.sessions:
                raise ApiError("NotFound", f"unknown session {session_id}")
            return self.sessions[session_id], self.locks[session_id]


class CreateSessionRequest(BaseModel):
    participant_id: str
    mode: str = "Questionnaire"
    sample_size: int | None = None
    seed: int


class SubmitResponsesRequest(BaseModel):
    friend_id: str
    responses: dict[str, str]
    timings: list[float]


class SubmitDecisionRequest(BaseModel):
    friend_id: str
    decision: str
    ignore_reason: str | None = None


def _session_status(session: AuditSession) -> dict:
    return {
        "session_id": session.session_id,
        "participant_id": session.participant_id,
        "mode": session.mode.value,
        "status": session.status.value,
        "queue_length": len(session.queue),
        "position": session.position,
    }


def _suggestion_payload(friend_id: str, verdict) -> dict:
    return {
        "friend_id": friend_id,
        "action": verdict.action.value,
        "matched_rule": verdict.matched_rule,
        "reasons": list(verdict.reasons),
        "compatible_decisions": sorted(
            d.value for d in COMPATIBLE_DECISIONS[verdict.action]
        ),
        "ignore_reasons": IGNORE_REASON_LABELS,
    }


def _next_step(session: AuditSession) -> dict:
    if session.status is SessionStatus.COMPLETE:
        return {"kind": "complete", "summary": session.summary().to_dict()}
    pending = session.pending_suggestion
    if pending is not None:
        friend_id, verdict = pending
        return {"kind": "suggestion", **_suggestion_payload(friend_id, verdict)}
    entry = session.current_entry()
    if entry is None:
        return {"kind": "waiting"}
    return {
        "kind": "questionnaire",
        "friend_id": entry.friend_id,
        "questions": [
            {
                "index": i,
                "text": QUESTION_TEXT[i],
                "answers": FREQUENCY_LABELS if i <= 2 else AGREEMENT_LABELS,
            }
            for i in range(1, 6)
        ],
    }


def create_app(snapshot: SocialSnapshot, config: SessionConfig | None = None) -> FastAPI:
    config = config or SessionConfig()
    store = SessionStore()
    app = FastAPI(title="friendaudit")
    app.state.store = store

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.http_status, content=exc.payload())

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "sessions": len(store.sessions)}

    @app.post("/sessions")
    def create(req: CreateSessionRequest) -> dict:
        try:
            mode = SessionMode(req.mode)
            session = create_session(
                snapshot,
                req.participant_id,
                mode,
                req.sample_size or config.sample_size,
                req.seed,
                config=config,
            )
        except ApiError:
            raise
        except Exception as exc:
            raise _to_api_error(exc)
        store.add(session)
        return {**_session_status(session), "next": _next_step(session)}

    @app.get("/sessions/{session_id}/next")
    def next_step(session_id: str) -> dict:
        session, lock = store.get(session_id)
        with lock:
            return {**_session_status(session), "next": _next_step(session)}

    @app.post("/sessions/{session_id}/responses")
    def submit_responses(session_id: str, req: SubmitResponsesRequest) -> dict:
        session, lock = store.get(session_id)
        with lock:
            try:
                responses = ResponseSet.from_labels(req.responses)
                verdict = session.submit_responses(
                    req.friend_id, responses, req.timings
                )
            except Exception as exc:
                raise _to_api_error(exc)
            suggestion = (
                _suggestion_payload(req.friend_id, verdict) if verdict else None
            )
            return {
                **_session_status(session),
                "suggestion": suggestion,
                "next": _next_step(session),
            }

    @app.post("/sessions/{session_id}/decision")
    def submit_decision(session_id: str, req: SubmitDecisionRequest) -> dict:
        session, lock = store.get(session_id)
        with lock:
            try:
                decision = build_decision(req.decision, req.ignore_reason)
                state = session.submit_decision(req.friend_id, decision)
            except Exception as exc:
                raise _to_api_error(exc)
            return {
                **_session_status(session),
                "state": {
                    "is_friend": state.is_friend,
                    "user_sees_friend": state.user_sees_friend,
                    "friend_sees_user": state.friend_sees_user,
                },
                "next": _next_step(session),
            }

    @app.get("/sessions/{session_id}/summary")
    def summary(session_id: str) -> dict:
        session, lock = store.get(session_id)
        with lock:
            try:
                return {**_session_status(session), "summary": session.summary().to_dict()}
            except Exception as exc:
                raise _to_api_error(exc)

    @app.get("/sessions/{session_id}/log")
    def log(session_id: str) -> PlainTextResponse:
        session, lock = store.get(session_id)
        with lock:
            return PlainTextResponse(session.log_text())

    return app
