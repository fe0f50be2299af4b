import json

import pytest

from friendaudit.features import load_snapshot
from friendaudit.synth import GeneratorParams, generate_population


def make_snapshot(users, posts=(), photos=()):
    """Build a snapshot from shorthand dicts via the real loader."""
    lines = []
    for uid, fields in users.items():
        lines.append(json.dumps({"kind": "user", "id": uid, **fields}))
    for pid, author, commenters in posts:
        lines.append(
            json.dumps(
                {"kind": "post", "post_id": pid, "author_id": author,
                 "commenter_ids": list(commenters)}
            )
        )
    for phid, tagged in photos:
        lines.append(
            json.dumps({"kind": "photo", "photo_id": phid, "tagged_ids": list(tagged)})
        )
    return load_snapshot(lines)


@pytest.fixture(scope="session")
def small_population():
    """A 40-user synthetic population shared by session/service tests."""
    return generate_population(GeneratorParams(user_count=40, seed=11))
