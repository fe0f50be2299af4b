"""Shared vocabulary: answers, actions, decisions, and relationship state.

All types here are immutable values and safe to share across threads.
Canonical text labels are the enum ``value`` strings; every file format and
wire payload uses them verbatim.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union


class FriendAuditError(Exception):
    """Base class for all domain errors raised by this package."""


class UnknownTokenError(FriendAuditError):
    """Token does not name any answer in any domain."""


class DomainMismatchError(FriendAuditError):
    """Token names an answer from the wrong domain for the question."""


class FrequencyAnswer(Enum):
    """Answer domain of Q1/Q2 (interaction frequency)."""

    FREQUENTLY = "Frequently"
    OCCASIONALLY = "Occasionally"
    NOT_ANYMORE = "NotAnymore"
    NEVER = "Never"
    DONT_REMEMBER = "DontRemember"


class AgreementAnswer(Enum):
    """Answer domain of Q3-Q5 (perceived abuse agreement)."""

    AGREE = "Agree"
    DISAGREE = "Disagree"
    DONT_KNOW = "DontKnow"


Answer = Union[FrequencyAnswer, AgreementAnswer]

#: Question index -> answer enum for that question's domain.
QUESTION_DOMAINS = {
    1: FrequencyAnswer,
    2: FrequencyAnswer,
    3: AgreementAnswer,
    4: AgreementAnswer,
    5: AgreementAnswer,
}


def _normalize_token(token: str) -> str:
    # Case-insensitive; internal whitespace and apostrophes are cosmetic,
    # so "Not Anymore" and "Don't Remember" map onto the canonical labels.
    return re.sub(r"[\s'’]+", "", token).casefold()


_FREQUENCY_BY_NORM = {_normalize_token(a.value): a for a in FrequencyAnswer}
_FREQUENCY_BY_NORM[_normalize_token("Not Anymore")] = FrequencyAnswer.NOT_ANYMORE
_FREQUENCY_BY_NORM[_normalize_token("Don't Remember")] = FrequencyAnswer.DONT_REMEMBER

_AGREEMENT_BY_NORM = {_normalize_token(a.value): a for a in AgreementAnswer}
_AGREEMENT_BY_NORM[_normalize_token("Don't Know")] = AgreementAnswer.DONT_KNOW


def parse_answer(question_index: int, token: str) -> Answer:
    """Parse an answer token for the given question (1..5).

    Raises UnknownTokenError if the token matches no answer at all, and
    DomainMismatchError if it matches an answer from the other domain
    (e.g. "Agree" for Q2).
    """
    if question_index not in QUESTION_DOMAINS:
        raise ValueError(f"question index must be 1..5, got {question_index}")
    norm = _normalize_token(token)
    domain = QUESTION_DOMAINS[question_index]
    table = _FREQUENCY_BY_NORM if domain is FrequencyAnswer else _AGREEMENT_BY_NORM
    other = _AGREEMENT_BY_NORM if domain is FrequencyAnswer else _FREQUENCY_BY_NORM
    if norm in table:
        return table[norm]
    if norm in other:
        raise DomainMismatchError(
            f"{token!r} is not a valid answer for Q{question_index}"
        )
    raise UnknownTokenError(f"unknown answer token {token!r}")


@dataclass(frozen=True)
class ResponseSet:
    """Answers to Q1-Q5 for one (user, friend) pair. Always complete."""

    q1: FrequencyAnswer
    q2: FrequencyAnswer
    q3: AgreementAnswer
    q4: AgreementAnswer
    q5: AgreementAnswer

    def __post_init__(self) -> None:
        for name, domain in (("q1", FrequencyAnswer), ("q2", FrequencyAnswer),
                             ("q3", AgreementAnswer), ("q4", AgreementAnswer),
                             ("q5", AgreementAnswer)):
            if not isinstance(getattr(self, name), domain):
                raise DomainMismatchError(
                    f"{name} must be a {domain.__name__}"
                )

    def answer(self, question_index: int) -> Answer:
        return (self.q1, self.q2, self.q3, self.q4, self.q5)[question_index - 1]

    def to_labels(self) -> dict[str, str]:
        return {f"q{i}": self.answer(i).value for i in range(1, 6)}

    @classmethod
    def from_labels(cls, labels: dict[str, str]) -> "ResponseSet":
        answers = [parse_answer(i, labels[f"q{i}"]) for i in range(1, 6)]
        return cls(*answers)  # type: ignore[arg-type]


class Action(Enum):
    """Defensive action suggested by the rule engine."""

    UNFRIEND = "Unfriend"
    UNFRIEND_OR_SANDBOX = "UnfriendOrSandbox"
    RESTRICT = "Restrict"
    UNFOLLOW = "Unfollow"
    NOP = "Nop"


class DecisionKind(Enum):
    """Terminal user choice for a suggested action."""

    UNFRIEND = "Unfriend"
    SANDBOX = "Sandbox"
    RESTRICT = "Restrict"
    UNFOLLOW = "Unfollow"
    IGNORE = "Ignore"


class IgnoreReason(Enum):
    """Fixed four-item reason list for ignoring a suggestion; no free text."""

    SUGGESTION_MAKES_NO_SENSE = "SuggestionMakesNoSense"
    AGREE_BUT_LATER = "AgreeButLater"
    AGREE_BUT_UNWILLING = "AgreeButUnwilling"
    FEAR_OF_BEING_OBSERVED = "FearOfBeingObserved"


class InvalidDecisionError(FriendAuditError):
    """Decision shape violates its invariant (reason iff Ignore)."""


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    ignore_reason: IgnoreReason | None = None

    def __post_init__(self) -> None:
        if self.kind is DecisionKind.IGNORE and self.ignore_reason is None:
            raise InvalidDecisionError("Ignore decisions require an ignore_reason")
        if self.kind is not DecisionKind.IGNORE and self.ignore_reason is not None:
            raise InvalidDecisionError("only Ignore decisions carry a reason")


class InvalidStateError(FriendAuditError):
    """RelationshipState invariant violated."""


@dataclass(frozen=True)
class RelationshipState:
    """A friendship edge plus the two directed story flows.

    user_sees_friend: the friend's stories reach the user's news feed.
    friend_sees_user: the user's stories reach the friend's news feed.
    """

    is_friend: bool = True
    user_sees_friend: bool = True
    friend_sees_user: bool = True

    def __post_init__(self) -> None:
        if not self.is_friend and (self.user_sees_friend or self.friend_sees_user):
            raise InvalidStateError("non-friends cannot exchange stories")


def apply_action(state: RelationshipState, decision: Decision) -> RelationshipState:
    """Apply a user decision to a relationship; total and idempotent.

    Sandbox cuts both flows without severing the friendship; Unfriend clears
    everything; Ignore is the identity. Applying a decision to a state that
    already lacks the relevant flow is a no-op, which keeps session-log
    replays simple.
    """
    kind = decision.kind
    if kind is DecisionKind.IGNORE:
        return state
    if kind is DecisionKind.UNFOLLOW:
        return replace(state, user_sees_friend=False)
    if kind is DecisionKind.RESTRICT:
        return replace(state, friend_sees_user=False)
    if kind is DecisionKind.SANDBOX:
        return replace(state, user_sees_friend=False, friend_sees_user=False)
    if kind is DecisionKind.UNFRIEND:
        return RelationshipState(False, False, False)
    raise AssertionError(f"unhandled decision kind {kind}")
