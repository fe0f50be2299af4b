"""Audit-session orchestration: friend sampling, questionnaire or prediction,
rule verdicts, accept/ignore decisions, and summaries.

A session is an append-only event log; every derived artifact (states,
summaries) is a fold over that log. Replaying the logged inputs through a
fresh session reproduces the log byte for byte, which is the backbone of
the replay-determinism guarantee.

One session is single-writer; distinct sessions are fully independent.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum

from friendaudit.domain import (
    Action,
    Decision,
    DecisionKind,
    FriendAuditError,
    IgnoreReason,
    InvalidDecisionError,
    RelationshipState,
    ResponseSet,
    apply_action,
)
from friendaudit.features import SocialSnapshot, compute_features
from friendaudit.learning import Model, predict
from friendaudit.quality import ParticipantRecord, QualityConfig
from friendaudit.rules import RuleTable, Verdict, canonical_rule_table, infer_action


class TooFewFriendsError(FriendAuditError):
    pass


class OutOfOrderError(FriendAuditError):
    pass


class DuplicateSubmissionError(FriendAuditError):
    pass


class NoPendingSuggestionError(FriendAuditError):
    pass


class IncompatibleDecisionError(FriendAuditError):
    pass


class MissingIgnoreReasonError(FriendAuditError):
    pass


class SessionIncompleteError(FriendAuditError):
    pass


class MissingModelError(FriendAuditError):
    pass


class SessionMode(Enum):
    QUESTIONNAIRE = "Questionnaire"
    WILD = "Wild"


class SessionStatus(Enum):
    IN_PROGRESS = "InProgress"
    COMPLETE = "Complete"


#: Decisions a user may take for each suggested action. Every suggestion can
#: be ignored; the stranger screen offers both unfriend and sandbox.
COMPATIBLE_DECISIONS: dict[Action, frozenset[DecisionKind]] = {
    Action.UNFRIEND: frozenset({DecisionKind.UNFRIEND, DecisionKind.IGNORE}),
    Action.UNFRIEND_OR_SANDBOX: frozenset(
        {DecisionKind.UNFRIEND, DecisionKind.SANDBOX, DecisionKind.IGNORE}
    ),
    Action.RESTRICT: frozenset({DecisionKind.RESTRICT, DecisionKind.IGNORE}),
    Action.UNFOLLOW: frozenset({DecisionKind.UNFOLLOW, DecisionKind.IGNORE}),
}


def build_decision(kind_label: str, ignore_reason_label: str | None = None) -> Decision:
    """Construct a Decision from wire labels; maps the reason invariant onto
    MissingIgnoreReasonError for callers that surface user input."""
    kind = DecisionKind(kind_label)
    reason = IgnoreReason(ignore_reason_label) if ignore_reason_label else None
    try:
        return Decision(kind, reason)
    except InvalidDecisionError as exc:
        if kind is DecisionKind.IGNORE:
            raise MissingIgnoreReasonError(str(exc)) from exc
        raise


@dataclass(frozen=True)
class SessionConfig:
    rule_table: RuleTable = field(default_factory=canonical_rule_table)
    quality: QualityConfig = field(default_factory=QualityConfig)
    sample_size: int = 20
    min_friend_count: int | None = None  # e.g. 30 to mirror recruitment floor


@dataclass(frozen=True)
class FriendEntry:
    friend_id: str
    bogus: bool


@dataclass(frozen=True)
class SessionSummary:
    # action label -> (recommended, accepted)
    actions: dict[str, tuple[int, int]]
    ignore_reasons: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "actions": {k: list(v) for k, v in sorted(self.actions.items())},
            "ignore_reasons": dict(sorted(self.ignore_reasons.items())),
        }


def _event_line(event: dict) -> str:
    return json.dumps(event, sort_keys=True, separators=(",", ":"))


class AuditSession:
    """Single-participant audit; construct via create_session."""

    def __init__(
        self,
        session_id: str,
        participant_id: str,
        mode: SessionMode,
        seed: int,
        queue: list[FriendEntry],
        config: SessionConfig,
    ) -> None:
        self.session_id = session_id
        self.participant_id = participant_id
        self.mode = mode
        self.seed = seed
        self.queue = queue
        self.config = config
        self.position = 0
        self.status = SessionStatus.IN_PROGRESS
        self.events: list[dict] = []
        self.responses: dict[str, ResponseSet] = {}
        self.timings: dict[str, list[float]] = {}
        self.suggestions: dict[str, Verdict] = {}
        self.decisions: dict[str, Decision] = {}
        self.states: dict[str, RelationshipState] = {
            e.friend_id: RelationshipState() for e in queue if not e.bogus
        }
        self._pending: list[tuple[str, Verdict]] = []
        self._wild_ran = False
        self.events.append(
            {
                "event": "created",
                "session_id": session_id,
                "participant_id": participant_id,
                "mode": mode.value,
                "seed": seed,
                "queue": [
                    {"friend_id": e.friend_id, "bogus": e.bogus} for e in queue
                ],
            }
        )

    # -- queue bookkeeping --------------------------------------------------

    @property
    def pending_suggestion(self) -> tuple[str, Verdict] | None:
        return self._pending[0] if self._pending else None

    def current_entry(self) -> FriendEntry | None:
        if self.position < len(self.queue):
            return self.queue[self.position]
        return None

    def _maybe_complete(self) -> None:
        if self.position >= len(self.queue) and not self._pending:
            if self.status is not SessionStatus.COMPLETE:
                self.status = SessionStatus.COMPLETE
                self.events.append({"event": "completed"})

    # -- questionnaire mode -------------------------------------------------

    def submit_responses(
        self, friend_id: str, responses: ResponseSet, timings: list[float]
    ) -> Verdict | None:
        """Store answers for the next queued friend; return a suggestion iff
        the rule verdict is not Nop. Bogus friends never yield suggestions."""
        if self.status is not SessionStatus.IN_PROGRESS:
            raise OutOfOrderError("session is complete")
        if self.mode is not SessionMode.QUESTIONNAIRE:
            raise OutOfOrderError("responses are only submitted in questionnaire mode")
        if self._pending:
            raise OutOfOrderError("a suggestion is pending; submit a decision first")
        if friend_id in self.responses:
            raise DuplicateSubmissionError(f"responses for {friend_id} already recorded")
        entry = self.current_entry()
        if entry is None or entry.friend_id != friend_id:
            expected = entry.friend_id if entry else "<none>"
            raise OutOfOrderError(
                f"expected responses for {expected}, got {friend_id}"
            )
        timings = [float(t) for t in timings]  # canonical log form, e.g. 5 -> 5.0
        self.responses[friend_id] = responses
        self.timings[friend_id] = timings
        self.events.append(
            {
                "event": "responses",
                "friend_id": friend_id,
                "responses": responses.to_labels(),
                "timings": timings,
            }
        )
        if entry.bogus:
            self.position += 1
            self._maybe_complete()
            return None
        verdict = infer_action(self.config.rule_table, responses)
        if verdict.action is Action.NOP:
            self.position += 1
            self._maybe_complete()
            return None
        self.suggestions[friend_id] = verdict
        self._pending.append((friend_id, verdict))
        self.events.append(
            {
                "event": "suggestion",
                "friend_id": friend_id,
                "action": verdict.action.value,
                "matched_rule": verdict.matched_rule,
                "reasons": list(verdict.reasons),
            }
        )
        return verdict

    def submit_decision(self, friend_id: str, decision: Decision) -> RelationshipState:
        """Resolve the pending suggestion; applies the action and advances."""
        if not self._pending:
            raise NoPendingSuggestionError("no suggestion is pending")
        pending_id, verdict = self._pending[0]
        if pending_id != friend_id:
            raise NoPendingSuggestionError(
                f"pending suggestion is for {pending_id}, not {friend_id}"
            )
        if decision.kind not in COMPATIBLE_DECISIONS[verdict.action]:
            raise IncompatibleDecisionError(
                f"decision {decision.kind.value} is incompatible with "
                f"suggestion {verdict.action.value}"
            )
        self._pending.pop(0)
        self.decisions[friend_id] = decision
        state = apply_action(self.states[friend_id], decision)
        self.states[friend_id] = state
        self.events.append(
            {
                "event": "decision",
                "friend_id": friend_id,
                "decision": decision.kind.value,
                "ignore_reason": (
                    decision.ignore_reason.value if decision.ignore_reason else None
                ),
            }
        )
        self.events.append(
            {
                "event": "state",
                "friend_id": friend_id,
                "is_friend": state.is_friend,
                "user_sees_friend": state.user_sees_friend,
                "friend_sees_user": state.friend_sees_user,
            }
        )
        if self.mode is SessionMode.QUESTIONNAIRE:
            self.position += 1
        self._maybe_complete()
        return state

    # -- wild mode ----------------------------------------------------------

    def run_wild(
        self, models: dict[str, Model], snapshot: SocialSnapshot
    ) -> list[tuple[str, Verdict]]:
        """Predict answers and decisions for every queued friend.

        A suggestion surfaces only when the rule verdict is not Nop AND the
        decision model does not predict "ignore". Features are computed,
        used for both predictions, and discarded; only predictions reach
        the log.
        """
        if self.mode is not SessionMode.WILD:
            raise OutOfOrderError("run_wild requires wild mode")
        if self._wild_ran:
            raise DuplicateSubmissionError("wild pass already ran for this session")
        for name in ("Q1", "Q2", "Q3", "Q4", "Q5", "Decision"):
            if name not in models:
                raise MissingModelError(f"missing model for target {name}")
        surfaced = []
        for entry in self.queue:
            features = compute_features(snapshot, self.participant_id, entry.friend_id)
            labels = {
                f"q{i}": predict(models[f"Q{i}"], features)[0] for i in range(1, 6)
            }
            responses = ResponseSet.from_labels(labels)
            predicted_decision, _ = predict(models["Decision"], features)
            del features
            self.responses[entry.friend_id] = responses
            self.events.append(
                {
                    "event": "predicted",
                    "friend_id": entry.friend_id,
                    "responses": responses.to_labels(),
                    "predicted_decision": predicted_decision,
                }
            )
            verdict = infer_action(self.config.rule_table, responses)
            if verdict.action is Action.NOP or predicted_decision == "ignore":
                continue
            self.suggestions[entry.friend_id] = verdict
            self._pending.append((entry.friend_id, verdict))
            surfaced.append((entry.friend_id, verdict))
            self.events.append(
                {
                    "event": "suggestion",
                    "friend_id": entry.friend_id,
                    "action": verdict.action.value,
                    "matched_rule": verdict.matched_rule,
                    "reasons": list(verdict.reasons),
                }
            )
        self._wild_ran = True
        self.position = len(self.queue)
        self._maybe_complete()
        return surfaced

    # -- summaries and export -----------------------------------------------

    def summary(self) -> SessionSummary:
        if self.status is not SessionStatus.COMPLETE:
            raise SessionIncompleteError("session is not complete")
        actions: dict[str, list[int]] = {}
        reasons: dict[str, int] = {}
        for friend_id, verdict in self.suggestions.items():
            row = actions.setdefault(verdict.action.value, [0, 0])
            row[0] += 1
            decision = self.decisions.get(friend_id)
            if decision is None:
                continue
            if decision.kind is DecisionKind.IGNORE:
                assert decision.ignore_reason is not None
                reasons[decision.ignore_reason.value] = (
                    reasons.get(decision.ignore_reason.value, 0) + 1
                )
            else:
                row[1] += 1
        return SessionSummary(
            actions={k: (v[0], v[1]) for k, v in actions.items()},
            ignore_reasons=reasons,
        )

    def log_text(self) -> str:
        return "\n".join(_event_line(e) for e in self.events) + "\n"

    def participant_record(self, attention_passed: bool = True) -> ParticipantRecord:
        """Assemble the screening view of this session."""
        timings = []
        for entry in self.queue:
            for i, seconds in enumerate(self.timings.get(entry.friend_id, []), start=1):
                timings.append((entry.friend_id, i, seconds))
        bogus = {
            e.friend_id: self.responses[e.friend_id]
            for e in self.queue
            if e.bogus and e.friend_id in self.responses
        }
        return ParticipantRecord(
            id=self.participant_id,
            attention_passed=attention_passed,
            timings=tuple(timings),
            bogus_responses=bogus,
        )


def create_session(
    snapshot: SocialSnapshot,
    participant_id: str,
    mode: SessionMode,
    sample_size: int,
    seed: int,
    config: SessionConfig | None = None,
    session_id: str | None = None,
) -> AuditSession:
    """Sample friends uniformly without replacement and build the queue.

    In questionnaire mode the configured bogus friends are spliced in at
    seeded random positions; wild mode audits only real friends.
    """
    config = config or SessionConfig()
    if participant_id not in snapshot.users:
        raise FriendAuditError(f"unknown participant {participant_id}")
    friends = sorted(snapshot.users[participant_id].friend_ids)
    if config.min_friend_count is not None and len(friends) < config.min_friend_count:
        raise TooFewFriendsError(
            f"participant has {len(friends)} friends; "
            f"at least {config.min_friend_count} required"
        )
    if sample_size > len(friends):
        raise TooFewFriendsError(
            f"cannot sample {sample_size} of {len(friends)} friends"
        )
    rng = random.Random(seed)
    sampled = rng.sample(friends, sample_size)
    entries = [FriendEntry(fid, bogus=False) for fid in sampled]
    if mode is SessionMode.QUESTIONNAIRE:
        for bogus_id in sorted(config.quality.bogus_friend_ids):
            position = rng.randint(0, len(entries))
            entries.insert(position, FriendEntry(bogus_id, bogus=True))
    return AuditSession(
        session_id=session_id or f"session-{participant_id}-{seed}",
        participant_id=participant_id,
        mode=mode,
        seed=seed,
        queue=entries,
        config=config,
    )


def replay_session(
    log_lines: list[str] | str,
    snapshot: SocialSnapshot,
    config: SessionConfig | None = None,
    models: dict[str, Model] | None = None,
) -> AuditSession:
    """Re-drive a persisted log's inputs through a fresh session.

    Only input events (created parameters, responses, decisions) are
    consumed; derived events are recomputed and must match the original log
    if nothing about the snapshot or config changed.
    """
    if isinstance(log_lines, str):
        log_lines = [line for line in log_lines.splitlines() if line.strip()]
    events = [json.loads(line) for line in log_lines]
    if not events or events[0]["event"] != "created":
        raise FriendAuditError("log must start with a created event")
    created = events[0]
    mode = SessionMode(created["mode"])
    sample_size = sum(1 for e in created["queue"] if not e["bogus"])
    session = create_session(
        snapshot,
        created["participant_id"],
        mode,
        sample_size,
        created["seed"],
        config=config,
        session_id=created["session_id"],
    )
    logged_queue = [(e["friend_id"], e["bogus"]) for e in created["queue"]]
    rebuilt_queue = [(e.friend_id, e.bogus) for e in session.queue]
    if logged_queue != rebuilt_queue:
        raise FriendAuditError("replayed queue differs; config or snapshot changed")
    wild_done = False
    for event in events[1:]:
        kind = event["event"]
        if kind == "responses":
            session.submit_responses(
                event["friend_id"],
                ResponseSet.from_labels(event["responses"]),
                event["timings"],
            )
        elif kind == "predicted" and not wild_done:
            if models is None:
                raise MissingModelError("wild-mode replay requires models")
            session.run_wild(models, snapshot)
            wild_done = True
        elif kind == "decision":
            session.submit_decision(
                event["friend_id"],
                build_decision(event["decision"], event.get("ignore_reason")),
            )
    return session
