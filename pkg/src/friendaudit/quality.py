"""Participant screening: attention check, bogus friends, response timing.

A participant is discarded when any enabled check fails; every failure is
recorded (no short-circuiting), so screening reports can explain verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from friendaudit.domain import FrequencyAnswer, FriendAuditError, ResponseSet


class MissingBogusResponseError(FriendAuditError):
    pass


class NoTimingsError(FriendAuditError):
    pass


@dataclass(frozen=True)
class QualityConfig:
    min_avg_response_seconds: float = 3.0
    bogus_friend_ids: frozenset[str] = frozenset()
    attention_check_required: bool = True

    def __post_init__(self) -> None:
        if self.min_avg_response_seconds <= 0:
            raise ValueError("min_avg_response_seconds must be positive")


@dataclass(frozen=True)
class ParticipantRecord:
    id: str
    attention_passed: bool
    # (friend id, question index, seconds) for every answered question and
    # decision screen; decision timings use question index 0.
    timings: tuple[tuple[str, int, float], ...]
    bogus_responses: dict[str, ResponseSet] = field(default_factory=dict)


class QualityCheck(Enum):
    ATTENTION_CHECK = "AttentionCheck"
    BOGUS_FRIEND = "BogusFriend"
    TIMING = "Timing"


@dataclass(frozen=True)
class QualityVerdict:
    participant_id: str
    retained: bool
    failed_checks: tuple[QualityCheck, ...]
    bogus_offenders: tuple[str, ...] = ()
    average_seconds: float | None = None

    def __post_init__(self) -> None:
        if self.retained != (not self.failed_checks):
            raise ValueError("retained must mirror an empty failed_checks list")


_HONEST_STRANGER_ANSWERS = {FrequencyAnswer.NEVER, FrequencyAnswer.DONT_REMEMBER}


def check_bogus(
    record: ParticipantRecord, config: QualityConfig
) -> tuple[bool, tuple[str, ...]]:
    """Fail iff any bogus friend got a Q1 or Q2 answer outside Never/DontRemember.

    Q3-Q5 are unconstrained: the participant cannot know anything about a
    fake identity's abusiveness, only that they never interacted.
    """
    offenders = []
    for friend_id in sorted(config.bogus_friend_ids):
        if friend_id not in record.bogus_responses:
            raise MissingBogusResponseError(
                f"participant {record.id} has no responses for bogus friend {friend_id}"
            )
        responses = record.bogus_responses[friend_id]
        if (
            responses.q1 not in _HONEST_STRANGER_ANSWERS
            or responses.q2 not in _HONEST_STRANGER_ANSWERS
        ):
            offenders.append(friend_id)
    return (not offenders, tuple(offenders))


def check_timing(record: ParticipantRecord, config: QualityConfig) -> tuple[bool, float]:
    """Fail iff the average over all timings is strictly below the threshold."""
    if not record.timings:
        raise NoTimingsError(f"participant {record.id} has no timings")
    average = sum(t[2] for t in record.timings) / len(record.timings)
    return (average >= config.min_avg_response_seconds, average)


def screen_participant(record: ParticipantRecord, config: QualityConfig) -> QualityVerdict:
    failed = []
    if config.attention_check_required and not record.attention_passed:
        failed.append(QualityCheck.ATTENTION_CHECK)
    bogus_ok, offenders = check_bogus(record, config)
    if not bogus_ok:
        failed.append(QualityCheck.BOGUS_FRIEND)
    timing_ok, average = check_timing(record, config)
    if not timing_ok:
        failed.append(QualityCheck.TIMING)
    return QualityVerdict(
        participant_id=record.id,
        retained=not failed,
        failed_checks=tuple(failed),
        bogus_offenders=offenders,
        average_seconds=average,
    )


def screen_participants(
    records: list[ParticipantRecord], config: QualityConfig
) -> tuple[list[ParticipantRecord], list[QualityVerdict]]:
    """Partition into retained records and discarded verdicts, in input order."""
    retained = []
    discarded = []
    for record in records:
        verdict = screen_participant(record, config)
        if verdict.retained:
            retained.append(record)
        else:
            discarded.append(verdict)
    return retained, discarded


def screening_report(
    records: list[ParticipantRecord], config: QualityConfig
) -> str:
    """Per-participant verdict lines plus aggregate counts."""
    retained, discarded = screen_participants(records, config)
    lines = []
    discarded_by_id = {v.participant_id: v for v in discarded}
    for record in records:
        if record.id in discarded_by_id:
            checks = ",".join(c.value for c in discarded_by_id[record.id].failed_checks)
            lines.append(f"{record.id}\tDISCARDED\t{checks}")
        else:
            lines.append(f"{record.id}\tRETAINED\t-")
    lines.append("")
    lines.append(
        f"total={len(records)} retained={len(retained)} discarded={len(discarded)}"
    )
    # Timing averages include decision-screen times, not just questionnaire
    # times; screens relying on questionnaire-only averages should filter
    # timings upstream.
    lines.append("timing basis: questionnaire and decision screens")
    return "\n".join(lines)
