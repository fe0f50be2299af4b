"""Friend-audit decision engine.

Detects perceived stranger and abusive friends from questionnaire answers
(or from classifiers trained on mutual-activity features), converts
detections into defensive actions via a first-match rule table, and drives
an accept/ignore intervention flow.
"""

from friendaudit.domain import (
    Action,
    AgreementAnswer,
    Decision,
    DecisionKind,
    FrequencyAnswer,
    IgnoreReason,
    RelationshipState,
    ResponseSet,
    apply_action,
    parse_answer,
)
from friendaudit.rules import RuleTable, Verdict, canonical_rule_table

__all__ = [
    "Action",
    "AgreementAnswer",
    "Decision",
    "DecisionKind",
    "FrequencyAnswer",
    "IgnoreReason",
    "RelationshipState",
    "ResponseSet",
    "RuleTable",
    "Verdict",
    "apply_action",
    "canonical_rule_table",
    "parse_answer",
]

__version__ = "0.1.0"
