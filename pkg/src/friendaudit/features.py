"""Mutual-activity feature extraction from a social-graph snapshot.

Snapshot format: line-delimited JSON, one object per line, tagged with a
``kind`` field (``user`` | ``post`` | ``photo``). Identifiers are opaque
strings. Friendship must already be symmetric; asymmetry is a load error,
never silently repaired.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from friendaudit.domain import FriendAuditError


class SnapshotParseError(FriendAuditError):
    """Malformed snapshot record; message carries the line number."""


class SnapshotIntegrityError(FriendAuditError):
    """Dangling id, duplicate id, or asymmetric friendship."""


class UnknownIdError(FriendAuditError):
    pass


class NotFriendsError(FriendAuditError):
    pass


@dataclass(frozen=True)
class UserProfile:
    id: str
    current_city: str | None = None
    hometown: str | None = None
    schools: frozenset[str] = frozenset()
    employers: frozenset[str] = frozenset()
    friend_ids: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.id in self.friend_ids:
            raise SnapshotIntegrityError(f"user {self.id} lists itself as a friend")


@dataclass(frozen=True)
class PostRecord:
    post_id: str
    author_id: str
    commenter_ids: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PhotoRecord:
    photo_id: str
    tagged_ids: frozenset[str]

    def __post_init__(self) -> None:
        if not self.tagged_ids:
            raise SnapshotIntegrityError(f"photo {self.photo_id} tags nobody")


@dataclass(frozen=True)
class SocialSnapshot:
    users: dict[str, UserProfile]
    posts: tuple[PostRecord, ...]
    photos: tuple[PhotoRecord, ...]


FEATURE_NAMES = (
    "mutual_post_count",
    "common_photo_count",
    "mutual_friend_count",
    "same_current_city",
    "same_hometown",
    "common_study_count",
    "common_work_count",
)


@dataclass(frozen=True)
class FeatureVector:
    """The 7 mutual-activity features for one friend pair."""

    mutual_post_count: int
    common_photo_count: int
    mutual_friend_count: int
    same_current_city: bool
    same_hometown: bool
    common_study_count: int
    common_work_count: int

    def as_row(self) -> tuple[float, ...]:
        """Numeric row in FEATURE_NAMES order; booleans become 0/1."""
        return (
            float(self.mutual_post_count),
            float(self.common_photo_count),
            float(self.mutual_friend_count),
            1.0 if self.same_current_city else 0.0,
            1.0 if self.same_hometown else 0.0,
            float(self.common_study_count),
            float(self.common_work_count),
        )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureVector":
        return cls(**{name: data[name] for name in FEATURE_NAMES})


def _require(record: dict, key: str, lineno: int):
    if key not in record:
        raise SnapshotParseError(f"line {lineno}: missing field {key!r}")
    return record[key]


def _check_integrity(snapshot: SocialSnapshot) -> None:
    users = snapshot.users
    for user in users.values():
        for fid in user.friend_ids:
            if fid not in users:
                raise SnapshotIntegrityError(
                    f"user {user.id} lists unknown friend {fid}"
                )
            if user.id not in users[fid].friend_ids:
                raise SnapshotIntegrityError(
                    f"asymmetric friendship: {user.id} -> {fid}"
                )
    for post in snapshot.posts:
        if post.author_id not in users:
            raise SnapshotIntegrityError(
                f"post {post.post_id} has unknown author {post.author_id}"
            )
        for cid in post.commenter_ids:
            if cid not in users:
                raise SnapshotIntegrityError(
                    f"post {post.post_id} has unknown commenter {cid}"
                )
    for photo in snapshot.photos:
        for tid in photo.tagged_ids:
            if tid not in users:
                raise SnapshotIntegrityError(
                    f"photo {photo.photo_id} tags unknown user {tid}"
                )


def load_snapshot(stream: IO[str] | Iterable[str]) -> SocialSnapshot:
    """Parse a line-delimited snapshot and verify all integrity invariants."""
    users: dict[str, UserProfile] = {}
    posts: list[PostRecord] = []
    photos: list[PhotoRecord] = []
    seen_posts: set[str] = set()
    seen_photos: set[str] = set()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SnapshotParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise SnapshotParseError(f"line {lineno}: record must be an object")
        kind = _require(record, "kind", lineno)
        if kind == "user":
            uid = str(_require(record, "id", lineno))
            if uid in users:
                raise SnapshotIntegrityError(f"duplicate user id {uid}")
            users[uid] = UserProfile(
                id=uid,
                current_city=record.get("current_city"),
                hometown=record.get("hometown"),
                schools=frozenset(record.get("schools", [])),
                employers=frozenset(record.get("employers", [])),
                friend_ids=frozenset(str(f) for f in record.get("friend_ids", [])),
            )
        elif kind == "post":
            pid = str(_require(record, "post_id", lineno))
            if pid in seen_posts:
                raise SnapshotIntegrityError(f"duplicate post id {pid}")
            seen_posts.add(pid)
            posts.append(
                PostRecord(
                    post_id=pid,
                    author_id=str(_require(record, "author_id", lineno)),
                    commenter_ids=frozenset(
                        str(c) for c in record.get("commenter_ids", [])
                    ),
                )
            )
        elif kind == "photo":
            phid = str(_require(record, "photo_id", lineno))
            if phid in seen_photos:
                raise SnapshotIntegrityError(f"duplicate photo id {phid}")
            seen_photos.add(phid)
            photos.append(
                PhotoRecord(
                    photo_id=phid,
                    tagged_ids=frozenset(
                        str(t) for t in _require(record, "tagged_ids", lineno)
                    ),
                )
            )
        else:
            raise SnapshotParseError(f"line {lineno}: unknown record kind {kind!r}")
    snapshot = SocialSnapshot(users=users, posts=tuple(posts), photos=tuple(photos))
    _check_integrity(snapshot)
    return snapshot


def load_snapshot_file(path: str) -> SocialSnapshot:
    with open(path, encoding="utf-8") as handle:
        return load_snapshot(handle)


def dump_snapshot(snapshot: SocialSnapshot) -> str:
    """Deterministic serialization: users, posts, photos, each sorted by id."""
    lines = []
    for uid in sorted(snapshot.users):
        u = snapshot.users[uid]
        lines.append(
            json.dumps(
                {
                    "kind": "user",
                    "id": u.id,
                    "current_city": u.current_city,
                    "hometown": u.hometown,
                    "schools": sorted(u.schools),
                    "employers": sorted(u.employers),
                    "friend_ids": sorted(u.friend_ids),
                },
                sort_keys=True,
            )
        )
    for post in sorted(snapshot.posts, key=lambda p: p.post_id):
        lines.append(
            json.dumps(
                {
                    "kind": "post",
                    "post_id": post.post_id,
                    "author_id": post.author_id,
                    "commenter_ids": sorted(post.commenter_ids),
                },
                sort_keys=True,
            )
        )
    for photo in sorted(snapshot.photos, key=lambda p: p.photo_id):
        lines.append(
            json.dumps(
                {
                    "kind": "photo",
                    "photo_id": photo.photo_id,
                    "tagged_ids": sorted(photo.tagged_ids),
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + "\n"


def _same_place(a: str | None, b: str | None) -> bool:
    # Missing on either side is never a match.
    if a is None or b is None:
        return False
    return a.strip().casefold() == b.strip().casefold()


def compute_features(snapshot: SocialSnapshot, user: str, friend: str) -> FeatureVector:
    """Compute the 7 mutual-activity features for a friend pair.

    All definitions are symmetric in (user, friend). Posts count once each,
    however many comments the other left on them; self-comments never count.
    """
    if user not in snapshot.users:
        raise UnknownIdError(f"unknown user id {user}")
    if friend not in snapshot.users:
        raise UnknownIdError(f"unknown user id {friend}")
    u = snapshot.users[user]
    f = snapshot.users[friend]
    if friend not in u.friend_ids:
        raise NotFriendsError(f"{user} and {friend} are not friends")

    mutual_posts = 0
    for post in snapshot.posts:
        if post.author_id == user and friend in post.commenter_ids:
            mutual_posts += 1
        elif post.author_id == friend and user in post.commenter_ids:
            mutual_posts += 1
    common_photos = sum(
        1 for photo in snapshot.photos if {user, friend} <= photo.tagged_ids
    )
    mutual_friends = len((u.friend_ids & f.friend_ids) - {user, friend})
    return FeatureVector(
        mutual_post_count=mutual_posts,
        common_photo_count=common_photos,
        mutual_friend_count=mutual_friends,
        same_current_city=_same_place(u.current_city, f.current_city),
        same_hometown=_same_place(u.hometown, f.hometown),
        common_study_count=len(u.schools & f.schools),
        common_work_count=len(u.employers & f.employers),
    )


def friend_pairs(snapshot: SocialSnapshot) -> list[tuple[str, str]]:
    """All friendship edges, each once, as a sorted (low, high) id pair."""
    pairs = set()
    for uid, profile in snapshot.users.items():
        for fid in profile.friend_ids:
            pairs.add((uid, fid) if uid < fid else (fid, uid))
    return sorted(pairs)
