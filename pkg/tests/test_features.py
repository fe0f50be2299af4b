import json
import random

import pytest

from friendaudit.features import (
    FeatureVector,
    NotFriendsError,
    SnapshotIntegrityError,
    SnapshotParseError,
    UnknownIdError,
    compute_features,
    dump_snapshot,
    friend_pairs,
    load_snapshot,
)
from tests.conftest import make_snapshot


@pytest.fixture
def fixture_snapshot():
    """Hand-authored pair with hand-counted expected features.

    U authored 2 posts commented by F, F authored 1 commented by U, 1 photo
    tags both, 3 common friends, same city up to case, different hometowns,
    1 shared school, no shared employers.
    """
    users = {
        "U": {
            "current_city": "Miami", "hometown": "Boston",
            "schools": ["State U", "North High"], "employers": ["Acme"],
            "friend_ids": ["F", "a", "b", "c", "d"],
        },
        "F": {
            "current_city": "miami", "hometown": "Denver",
            "schools": ["State U"], "employers": ["Globex"],
            "friend_ids": ["U", "a", "b", "c", "e"],
        },
        "a": {"friend_ids": ["U", "F"]},
        "b": {"friend_ids": ["U", "F"]},
        "c": {"friend_ids": ["U", "F"]},
        "d": {"friend_ids": ["U"]},
        "e": {"friend_ids": ["F"]},
    }
    posts = [
        ("p1", "U", ["F"]),
        ("p2", "U", ["F", "a"]),
        ("p3", "F", ["U"]),
        ("p4", "U", ["a"]),      # F never commented
        ("p5", "F", ["F"]),      # self-comment, never mutual
    ]
    photos = [
        ("ph1", ["U", "F", "a"]),
        ("ph2", ["U", "a"]),
    ]
    return make_snapshot(users, posts, photos)


class TestLoadSnapshot:
    def test_empty_document(self):
        snapshot = load_snapshot([])
        assert not snapshot.users and not snapshot.posts and not snapshot.photos

    def test_dangling_post_author(self):
        lines = [
            json.dumps({"kind": "user", "id": "U", "friend_ids": []}),
            json.dumps({"kind": "post", "post_id": "p", "author_id": "ghost"}),
        ]
        with pytest.raises(SnapshotIntegrityError):
            load_snapshot(lines)

    def test_asymmetric_friendship(self):
        lines = [
            json.dumps({"kind": "user", "id": "U", "friend_ids": ["F"]}),
            json.dumps({"kind": "user", "id": "F", "friend_ids": []}),
        ]
        with pytest.raises(SnapshotIntegrityError):
            load_snapshot(lines)

    def test_duplicate_id(self):
        line = json.dumps({"kind": "user", "id": "U", "friend_ids": []})
        with pytest.raises(SnapshotIntegrityError):
            load_snapshot([line, line])

    def test_parse_error_carries_line_number(self):
        with pytest.raises(SnapshotParseError, match="line 2"):
            load_snapshot(['{"kind": "user", "id": "U"}', "not json"])

    def test_fixture_counts(self, fixture_snapshot):
        assert len(fixture_snapshot.users) == 7
        assert len(fixture_snapshot.posts) == 5
        assert len(fixture_snapshot.photos) == 2

    def test_dump_round_trip(self, fixture_snapshot):
        text = dump_snapshot(fixture_snapshot)
        reloaded = load_snapshot(text.splitlines())
        assert dump_snapshot(reloaded) == text


class TestComputeFeatures:
    def test_fixture_hand_counts(self, fixture_snapshot):
        features = compute_features(fixture_snapshot, "U", "F")
        assert features == FeatureVector(
            mutual_post_count=3,
            common_photo_count=1,
            mutual_friend_count=3,
            same_current_city=True,
            same_hometown=False,
            common_study_count=1,
            common_work_count=0,
        )

    def test_symmetry(self, fixture_snapshot):
        assert compute_features(fixture_snapshot, "U", "F") == compute_features(
            fixture_snapshot, "F", "U"
        )

    def test_disjoint_pair_all_zero(self):
        snapshot = make_snapshot(
            {"U": {"friend_ids": ["F"]}, "F": {"friend_ids": ["U"]}}
        )
        assert compute_features(snapshot, "U", "F") == FeatureVector(
            0, 0, 0, False, False, 0, 0
        )

    def test_missing_city_never_matches(self):
        snapshot = make_snapshot(
            {
                "U": {"friend_ids": ["F"], "current_city": "Miami"},
                "F": {"friend_ids": ["U"]},
            }
        )
        assert not compute_features(snapshot, "U", "F").same_current_city

    def test_unknown_id(self, fixture_snapshot):
        with pytest.raises(UnknownIdError):
            compute_features(fixture_snapshot, "U", "ghost")

    def test_not_friends(self, fixture_snapshot):
        with pytest.raises(NotFriendsError):
            compute_features(fixture_snapshot, "U", "e")

    def test_adding_shared_photo_bumps_only_photo_count(self, fixture_snapshot):
        before = compute_features(fixture_snapshot, "U", "F")
        extra = make_snapshot(
            {
                uid: {
                    "current_city": u.current_city,
                    "hometown": u.hometown,
                    "schools": sorted(u.schools),
                    "employers": sorted(u.employers),
                    "friend_ids": sorted(u.friend_ids),
                }
                for uid, u in fixture_snapshot.users.items()
            },
            [(p.post_id, p.author_id, sorted(p.commenter_ids))
             for p in fixture_snapshot.posts],
            [(p.photo_id, sorted(p.tagged_ids)) for p in fixture_snapshot.photos]
            + [("ph-extra", ["U", "F"])],
        )
        after = compute_features(extra, "U", "F")
        assert after.common_photo_count == before.common_photo_count + 1
        assert after == FeatureVector(
            **{**before.to_dict(), "common_photo_count": after.common_photo_count}
        )


# -- brute-force oracle ------------------------------------------------------


def random_snapshot(rng):
    n = rng.randint(2, 6)
    ids = [f"u{i}" for i in range(n)]
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.6:
                edges.add((ids[i], ids[j]))
    places = ["x", "y", None]
    users = {
        uid: {
            "current_city": rng.choice(places),
            "hometown": rng.choice(places),
            "schools": rng.sample(["s1", "s2", "s3"], rng.randint(0, 3)),
            "employers": rng.sample(["e1", "e2"], rng.randint(0, 2)),
            "friend_ids": sorted(
                {b for a, b in edges if a == uid} | {a for a, b in edges if b == uid}
            ),
        }
        for uid in ids
    }
    posts = [
        (
            f"p{k}",
            rng.choice(ids),
            rng.sample(ids, rng.randint(0, n)),
        )
        for k in range(rng.randint(0, 8))
    ]
    photos = [
        (f"ph{k}", rng.sample(ids, rng.randint(1, n)))
        for k in range(rng.randint(0, 6))
    ]
    return make_snapshot(users, posts, photos), sorted(edges)


def oracle_features(snapshot, u, f):
    """Independent loop-based recount of all seven features."""
    pu, pf = snapshot.users[u], snapshot.users[f]
    posts = 0
    for p in snapshot.posts:
        if p.author_id == u:
            if any(c == f for c in p.commenter_ids):
                posts += 1
        if p.author_id == f:
            if any(c == u for c in p.commenter_ids):
                posts += 1
    photos = 0
    for ph in snapshot.photos:
        if u in ph.tagged_ids and f in ph.tagged_ids:
            photos += 1
    mutual = 0
    for other in snapshot.users:
        if other in (u, f):
            continue
        if other in pu.friend_ids and other in pf.friend_ids:
            mutual += 1

    def same(a, b):
        return a is not None and b is not None and a.strip().lower() == b.strip().lower()

    return (
        posts,
        photos,
        mutual,
        same(pu.current_city, pf.current_city),
        same(pu.hometown, pf.hometown),
        sum(1 for s in pu.schools if s in pf.schools),
        sum(1 for e in pu.employers if e in pf.employers),
    )


def test_brute_force_oracle_on_random_snapshots():
    rng = random.Random(20260824)
    checked = 0
    for _ in range(200):
        snapshot, edges = random_snapshot(rng)
        for u, f in edges:
            got = compute_features(snapshot, u, f)
            assert got.as_row() == tuple(float(v) for v in oracle_features(snapshot, u, f))
            assert got == compute_features(snapshot, f, u)
            checked += 1
    assert checked > 100


def test_friend_pairs_lists_each_edge_once():
    rng = random.Random(5)
    snapshot, edges = random_snapshot(rng)
    assert friend_pairs(snapshot) == edges
