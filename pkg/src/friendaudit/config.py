"""JSON config file for session, quality, and rule-table settings.

Schema (all keys optional):
{
  "rule_table_path": "path/to/table.rules",   // default: embedded canonical
  "sandbox_enabled": true,
  "sample_size": 20,
  "min_friend_count": 30,
  "quality": {
    "min_avg_response_seconds": 3.0,
    "bogus_friend_ids": ["b1", "b2", "b3"],
    "attention_check_required": true
  }
}
"""

from __future__ import annotations

import json

from friendaudit.quality import QualityConfig
from friendaudit.rules import canonical_rule_table, load_rule_table_file
from friendaudit.session import SessionConfig


def session_config_from_dict(doc: dict) -> SessionConfig:
    sandbox = bool(doc.get("sandbox_enabled", False))
    if "rule_table_path" in doc:
        table = load_rule_table_file(doc["rule_table_path"], sandbox_enabled=sandbox)
    else:
        table = canonical_rule_table(sandbox_enabled=sandbox)
    quality_doc = doc.get("quality", {})
    quality = QualityConfig(
        min_avg_response_seconds=quality_doc.get("min_avg_response_seconds", 3.0),
        bogus_friend_ids=frozenset(quality_doc.get("bogus_friend_ids", [])),
        attention_check_required=quality_doc.get("attention_check_required", True),
    )
    return SessionConfig(
        rule_table=table,
        quality=quality,
        sample_size=doc.get("sample_size", 20),
        min_friend_count=doc.get("min_friend_count"),
    )


def load_session_config(path: str) -> SessionConfig:
    with open(path, encoding="utf-8") as handle:
        return session_config_from_dict(json.load(handle))
