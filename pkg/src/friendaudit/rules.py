"""First-match rule table mapping a ResponseSet to a defensive action.

The table is data, not code: the canonical sixteen-rule policy ships both
embedded here and as a config file (``data/canonical.rules``), so study
variants can be expressed as alternative files and validated offline.

A subtlety worth stating twice: ``!Never`` is satisfied by "Don't Remember"
and ``!Agree`` is satisfied by "Don't Know". Rows 3-15 depend on this.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Iterator

from friendaudit.domain import (
    Action,
    AgreementAnswer,
    Answer,
    DomainMismatchError,
    FrequencyAnswer,
    FriendAuditError,
    QUESTION_DOMAINS,
    ResponseSet,
    parse_answer,
)


class RuleTableError(FriendAuditError):
    """Malformed rule table or rule-table file."""


class PatternOp(Enum):
    ANY = "any"
    IS = "is"
    NOT = "not"


@dataclass(frozen=True)
class SlotPattern:
    """Pattern over one answer slot: ``*``, ``<label>`` or ``!<label>``."""

    op: PatternOp
    answer: Answer | None = None

    def __post_init__(self) -> None:
        if self.op is PatternOp.ANY and self.answer is not None:
            raise RuleTableError("wildcard patterns carry no answer")
        if self.op is not PatternOp.ANY and self.answer is None:
            raise RuleTableError(f"{self.op.value} pattern requires an answer")

    def matches(self, answer: Answer) -> bool:
        if self.op is PatternOp.ANY:
            return True
        if self.op is PatternOp.IS:
            return answer == self.answer
        return answer != self.answer

    def token(self) -> str:
        if self.op is PatternOp.ANY:
            return "*"
        assert self.answer is not None
        prefix = "!" if self.op is PatternOp.NOT else ""
        return prefix + self.answer.value

    @classmethod
    def parse(cls, question_index: int, token: str) -> "SlotPattern":
        token = token.strip()
        if token == "*":
            return cls(PatternOp.ANY)
        if token.startswith("!"):
            return cls(PatternOp.NOT, parse_answer(question_index, token[1:]))
        return cls(PatternOp.IS, parse_answer(question_index, token))


def match_slot(pattern: SlotPattern, answer: Answer) -> bool:
    """True iff the answer satisfies the slot pattern."""
    return pattern.matches(answer)


@dataclass(frozen=True)
class Rule:
    index: int
    slots: tuple[SlotPattern, SlotPattern, SlotPattern, SlotPattern, SlotPattern]
    action: Action

    def matches(self, responses: ResponseSet) -> bool:
        return all(
            slot.matches(responses.answer(i + 1)) for i, slot in enumerate(self.slots)
        )


@dataclass(frozen=True)
class Verdict:
    action: Action
    matched_rule: int
    reasons: tuple[str, ...]


# Reason text keyed by (question index, op, canonical answer label).
# Screens show one reason per non-wildcard constraint the answer satisfied.
_REASON_TEXT = {
    (1, PatternOp.IS, "Never"): "You have never interacted with this friend online.",
    (1, PatternOp.NOT, "Never"): "You have interacted with this friend online.",
    (2, PatternOp.IS, "Never"): "You have never interacted with this friend in real life.",
    (2, PatternOp.NOT, "Never"): "You have interacted with this friend in real life.",
    (3, PatternOp.IS, "Agree"): "You believe this friend would misuse a sensitive picture you upload.",
    (3, PatternOp.NOT, "Agree"): "You do not believe this friend would misuse your pictures.",
    (4, PatternOp.IS, "Agree"): "You believe this friend would abuse a status update you post.",
    (4, PatternOp.NOT, "Agree"): "You do not believe this friend would abuse your status updates.",
    (5, PatternOp.IS, "Agree"): "You believe this friend would post offensive, misleading, false or malicious content.",
    (5, PatternOp.NOT, "Agree"): "You do not believe this friend would post offensive or malicious content.",
}


def _reason_for(question_index: int, pattern: SlotPattern) -> str:
    assert pattern.op is not PatternOp.ANY and pattern.answer is not None
    key = (question_index, pattern.op, pattern.answer.value)
    if key in _REASON_TEXT:
        return _REASON_TEXT[key]
    rel = "is" if pattern.op is PatternOp.IS else "is not"
    return f"Your Q{question_index} answer {rel} '{pattern.answer.value}'."


@dataclass(frozen=True)
class RuleTable:
    """Ordered rule list evaluated on a first-match basis.

    The final rule must be an all-wildcard Nop so every ResponseSet matches
    something. Rule 1's stored action is UnfriendOrSandbox; with
    sandbox_enabled=False it is surfaced as plain Unfriend (study-1 policy).
    """

    rules: tuple[Rule, ...]
    sandbox_enabled: bool = False

    def __post_init__(self) -> None:
        if not self.rules:
            raise RuleTableError("rule table is empty")
        indices = [r.index for r in self.rules]
        if indices != list(range(1, len(self.rules) + 1)):
            raise RuleTableError("rule indices must be 1..n and contiguous")

    def effective_action(self, rule: Rule) -> Action:
        if rule.action is Action.UNFRIEND_OR_SANDBOX and not self.sandbox_enabled:
            return Action.UNFRIEND
        return rule.action

    def with_sandbox(self, enabled: bool) -> "RuleTable":
        return RuleTable(self.rules, sandbox_enabled=enabled)


def infer_action(table: RuleTable, responses: ResponseSet) -> Verdict:
    """Return the verdict of the lowest-index rule whose five slots all match."""
    for rule in table.rules:
        if rule.matches(responses):
            reasons = tuple(
                _reason_for(i + 1, slot)
                for i, slot in enumerate(rule.slots)
                if slot.op is not PatternOp.ANY
            )
            return Verdict(table.effective_action(rule), rule.index, reasons)
    raise RuleTableError("no rule matched; table is not total")


def all_response_sets() -> Iterator[ResponseSet]:
    """All 675 possible response sets (5 x 5 x 3 x 3 x 3)."""
    for combo in itertools.product(
        FrequencyAnswer, FrequencyAnswer, AgreementAnswer, AgreementAnswer, AgreementAnswer
    ):
        yield ResponseSet(*combo)


@dataclass
class ValidationReport:
    total: bool
    unmatched: list[ResponseSet] = field(default_factory=list)
    unreachable_rules: list[int] = field(default_factory=list)
    domain_errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.total and not self.unreachable_rules and not self.domain_errors


def validate_rule_table(table: RuleTable) -> ValidationReport:
    """Exhaustively check totality, per-rule reachability and slot domains."""
    report = ValidationReport(total=True)
    for rule in table.rules:
        for i, slot in enumerate(rule.slots):
            domain = QUESTION_DOMAINS[i + 1]
            if slot.op is not PatternOp.ANY and not isinstance(slot.answer, domain):
                report.domain_errors.append(
                    f"rule {rule.index} slot Q{i + 1}: answer {slot.token()!r} "
                    f"outside domain {domain.__name__}"
                )
    matched_indices: set[int] = set()
    for responses in all_response_sets():
        hit = next((r for r in table.rules if r.matches(responses)), None)
        if hit is None:
            report.total = False
            report.unmatched.append(responses)
        else:
            matched_indices.add(hit.index)
    report.unreachable_rules = [
        r.index for r in table.rules if r.index not in matched_indices
    ]
    return report


# -- Rule-table file format -------------------------------------------------
#
# One record per rule, pipe-separated:
#   index | Q1 | Q2 | Q3 | Q4 | Q5 | action
# Slot tokens: `*`, `<label>`, `!<label>`. Blank lines and `#` comments skipped.


def parse_rule_line(line: str, lineno: int) -> Rule:
    parts = [p.strip() for p in line.split("|")]
    if len(parts) != 7:
        raise RuleTableError(f"line {lineno}: expected 7 fields, got {len(parts)}")
    try:
        index = int(parts[0])
    except ValueError as exc:
        raise RuleTableError(f"line {lineno}: bad rule index {parts[0]!r}") from exc
    try:
        slots = tuple(SlotPattern.parse(i + 1, parts[i + 1]) for i in range(5))
    except (DomainMismatchError, FriendAuditError) as exc:
        raise RuleTableError(f"line {lineno}: {exc}") from exc
    try:
        action = Action(parts[6])
    except ValueError as exc:
        raise RuleTableError(f"line {lineno}: unknown action {parts[6]!r}") from exc
    return Rule(index, slots, action)  # type: ignore[arg-type]


def load_rule_table(lines: Iterable[str], sandbox_enabled: bool = False) -> RuleTable:
    rules = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rules.append(parse_rule_line(line, lineno))
    return RuleTable(tuple(rules), sandbox_enabled=sandbox_enabled)


def load_rule_table_file(path: str, sandbox_enabled: bool = False) -> RuleTable:
    with open(path, encoding="utf-8") as handle:
        return load_rule_table(handle, sandbox_enabled=sandbox_enabled)


def dump_rule_table(table: RuleTable) -> str:
    lines = ["# index | Q1 | Q2 | Q3 | Q4 | Q5 | action"]
    for rule in table.rules:
        tokens = " | ".join(slot.token() for slot in rule.slots)
        lines.append(f"{rule.index} | {tokens} | {rule.action.value}")
    return "\n".join(lines) + "\n"


_CANONICAL_ROWS = [
    ("Never", "Never", "!Agree", "!Agree", "!Agree", Action.UNFRIEND_OR_SANDBOX),
    ("Never", "Never", "*", "*", "*", Action.UNFRIEND),
    ("Never", "!Never", "Agree", "Agree", "Agree", Action.UNFRIEND),
    ("!Never", "Never", "Agree", "Agree", "Agree", Action.UNFRIEND),
    ("Never", "!Never", "Agree", "!Agree", "Agree", Action.UNFRIEND),
    ("Never", "!Never", "!Agree", "Agree", "Agree", Action.UNFRIEND),
    ("!Never", "Never", "Agree", "!Agree", "Agree", Action.UNFRIEND),
    ("!Never", "Never", "!Agree", "Agree", "Agree", Action.UNFRIEND),
    ("!Never", "!Never", "Agree", "Agree", "Agree", Action.UNFRIEND),
    ("!Never", "!Never", "Agree", "!Agree", "Agree", Action.UNFRIEND),
    ("!Never", "!Never", "!Agree", "Agree", "Agree", Action.UNFRIEND),
    ("!Never", "!Never", "Agree", "Agree", "!Agree", Action.RESTRICT),
    ("!Never", "!Never", "Agree", "!Agree", "!Agree", Action.RESTRICT),
    ("!Never", "!Never", "!Agree", "Agree", "!Agree", Action.RESTRICT),
    ("!Never", "!Never", "!Agree", "!Agree", "Agree", Action.UNFOLLOW),
    ("*", "*", "*", "*", "*", Action.NOP),
]


def canonical_rule_table(sandbox_enabled: bool = False) -> RuleTable:
    """The sixteen-rule policy table shipped with the package."""
    rules = tuple(
        Rule(
            i + 1,
            tuple(SlotPattern.parse(q + 1, row[q]) for q in range(5)),  # type: ignore[arg-type]
            row[5],
        )
        for i, row in enumerate(_CANONICAL_ROWS)
    )
    return RuleTable(rules, sandbox_enabled=sandbox_enabled)


def canonical_rule_file_text() -> str:
    """Contents of the shipped canonical rule file (bit-exact)."""
    return (
        resources.files("friendaudit").joinpath("data/canonical.rules").read_text("utf-8")
    )
