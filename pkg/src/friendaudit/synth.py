"""Synthetic population generator with ground-truth labels.

Builds a community-structured friendship graph where a latent per-edge tie
strength drives both the generated social artifacts (posts, photo tags,
shared places) and the questionnaire answers, so answers are learnable from
the extracted features. All conditional probabilities here are test
fictions, not findings.

With ``answer_noise=0`` the Q1/Q2 answers are a deterministic function of
the realized mutual post and photo counts, which makes those targets
perfectly separable for tree learners.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from friendaudit.domain import (
    AgreementAnswer,
    FrequencyAnswer,
    FriendAuditError,
    ResponseSet,
)
from friendaudit.features import (
    PhotoRecord,
    PostRecord,
    SocialSnapshot,
    UserProfile,
    compute_features,
)
from friendaudit.learning import LabeledInstance, TARGETS
from friendaudit.rules import canonical_rule_table, infer_action
from friendaudit.domain import Action


class InvalidParamsError(FriendAuditError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    user_count: int = 114
    community_size: int = 12
    within_community_edge_prob: float = 0.85
    mean_degree: float = 25.5
    seed: int = 0
    # Tie-strength ranges for within-community vs cross-community edges.
    within_tie_range: tuple[float, float] = (0.35, 1.0)
    cross_tie_range: tuple[float, float] = (0.0, 0.5)
    # Artifact intensity: expected posts / photos at tie strength 1.
    post_rate: float = 16.0
    photo_rate: float = 7.0
    # Probability that a Q1/Q2 answer is replaced by a uniform random one.
    answer_noise: float = 0.0
    # Acceptance probabilities per suggested action (ground-truth decisions).
    accept_probs: dict = field(
        default_factory=lambda: {
            "Unfriend": 0.70,
            "UnfriendOrSandbox": 0.92,
            "Restrict": 0.92,
            "Unfollow": 0.95,
        }
    )
    sandbox_share: float = 0.7  # of accepted stranger suggestions, pick sandbox

    def __post_init__(self) -> None:
        if self.user_count < 1:
            raise InvalidParamsError("user_count must be >= 1")
        if self.community_size < 1:
            raise InvalidParamsError("community_size must be >= 1")
        if not 0.0 <= self.answer_noise <= 1.0:
            raise InvalidParamsError("answer_noise must be in [0, 1]")
        for value in self.accept_probs.values():
            if not 0.0 <= value <= 1.0:
                raise InvalidParamsError("accept probabilities must be in [0, 1]")
        for lo, hi in (self.within_tie_range, self.cross_tie_range):
            if not 0.0 <= lo <= hi <= 1.0:
                raise InvalidParamsError("tie ranges must satisfy 0 <= lo <= hi <= 1")


@dataclass(frozen=True)
class GroundTruthRecord:
    tie_strength: float
    responses: ResponseSet
    decision: str  # one of the five decision classes, lowercase


@dataclass(frozen=True)
class GroundTruth:
    # keyed by sorted (low id, high id) pair
    records: dict[tuple[str, str], GroundTruthRecord]

    def to_text(self) -> str:
        lines = []
        for (u, f), rec in sorted(self.records.items()):
            lines.append(
                json.dumps(
                    {
                        "user": u,
                        "friend": f,
                        "tie_strength": round(rec.tie_strength, 6),
                        "responses": rec.responses.to_labels(),
                        "decision": rec.decision,
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n" if lines else ""

    @classmethod
    def from_text(cls, text: str) -> "GroundTruth":
        records = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            records[(doc["user"], doc["friend"])] = GroundTruthRecord(
                tie_strength=doc["tie_strength"],
                responses=ResponseSet.from_labels(doc["responses"]),
                decision=doc["decision"],
            )
        return cls(records)


_Q1_POST_BINS = ((0, FrequencyAnswer.NEVER), (2, FrequencyAnswer.DONT_REMEMBER),
                 (5, FrequencyAnswer.NOT_ANYMORE), (9, FrequencyAnswer.OCCASIONALLY))
_Q2_PHOTO_BINS = ((0, FrequencyAnswer.NEVER), (1, FrequencyAnswer.DONT_REMEMBER),
                  (3, FrequencyAnswer.NOT_ANYMORE), (5, FrequencyAnswer.OCCASIONALLY))


def _bin_answer(count: int, bins) -> FrequencyAnswer:
    for upper, answer in bins:
        if count <= upper:
            return answer
    return FrequencyAnswer.FREQUENTLY


def _maybe_noise(
    answer: FrequencyAnswer, noise: float, rng: np.random.Generator
) -> FrequencyAnswer:
    if noise > 0.0 and rng.random() < noise:
        return list(FrequencyAnswer)[rng.integers(5)]
    return answer


def _agreement(t: float, rng: np.random.Generator) -> AgreementAnswer:
    # Any single Agree on Q3-Q5 already triggers a restrictive rule for
    # non-strangers, so agreement must stay rare to keep the planted abuse
    # share near one third of all pairs.
    p_agree = 0.04 + 0.12 * (1.0 - t)
    p_disagree = 0.50 + 0.30 * t
    p_dont_know = max(0.0, 1.0 - p_agree - p_disagree)
    total = p_agree + p_disagree + p_dont_know
    r = rng.random() * total
    if r < p_agree:
        return AgreementAnswer.AGREE
    if r < p_agree + p_disagree:
        return AgreementAnswer.DISAGREE
    return AgreementAnswer.DONT_KNOW


def generate_population(params: GeneratorParams) -> tuple[SocialSnapshot, GroundTruth]:
    """Deterministic under the seed; the snapshot passes all load invariants."""
    rng = np.random.default_rng(params.seed)
    n = params.user_count
    ids = [f"u{i:04d}" for i in range(n)]
    community_of = {uid: i // params.community_size for i, uid in enumerate(ids)}
    community_count = (n + params.community_size - 1) // params.community_size

    cities = [f"city-{c}" for c in range(community_count)]
    hometowns = [f"town-{c}" for c in range(community_count)]
    schools = [f"school-{c}" for c in range(community_count)]
    employers = [f"company-{c}" for c in range(community_count)]

    profiles: dict[str, dict] = {}
    for uid in ids:
        c = community_of[uid]
        profiles[uid] = {
            "current_city": cities[c] if rng.random() < 0.75 else cities[rng.integers(community_count)],
            "hometown": hometowns[c] if rng.random() < 0.7 else hometowns[rng.integers(community_count)],
            "schools": {schools[c]} if rng.random() < 0.8 else {schools[rng.integers(community_count)]},
            "employers": {employers[c]} if rng.random() < 0.5 else {employers[rng.integers(community_count)]},
            "friends": set(),
        }

    # Edge probabilities: dense within a community, sparse across, tuned so
    # the expected degree lands near mean_degree.
    within_pairs = max(params.community_size - 1, 1)
    cross_pairs = max(n - params.community_size, 1)
    expected_within = within_pairs * params.within_community_edge_prob
    cross_prob = max(0.0, min(1.0, (params.mean_degree - expected_within) / cross_pairs))

    posts: list[PostRecord] = []
    photos: list[PhotoRecord] = []
    truth: dict[tuple[str, str], GroundTruthRecord] = {}
    table = canonical_rule_table(sandbox_enabled=True)
    artifact_serial = 0

    for i in range(n):
        for j in range(i + 1, n):
            u, f = ids[i], ids[j]
            same = community_of[u] == community_of[f]
            p = params.within_community_edge_prob if same else cross_prob
            if rng.random() >= p:
                continue
            profiles[u]["friends"].add(f)
            profiles[f]["friends"].add(u)
            lo, hi = params.within_tie_range if same else params.cross_tie_range
            t = float(rng.uniform(lo, hi))

            post_count = int(rng.poisson(t * params.post_rate))
            for k in range(post_count):
                author, commenter = (u, f) if k % 2 == 0 else (f, u)
                posts.append(
                    PostRecord(
                        post_id=f"p{artifact_serial:06d}",
                        author_id=author,
                        commenter_ids=frozenset({commenter}),
                    )
                )
                artifact_serial += 1
            photo_count = int(rng.poisson(t * params.photo_rate))
            for _ in range(photo_count):
                photos.append(
                    PhotoRecord(
                        photo_id=f"ph{artifact_serial:06d}",
                        tagged_ids=frozenset({u, f}),
                    )
                )
                artifact_serial += 1

            q1 = _maybe_noise(_bin_answer(post_count, _Q1_POST_BINS), params.answer_noise, rng)
            q2 = _maybe_noise(_bin_answer(photo_count, _Q2_PHOTO_BINS), params.answer_noise, rng)
            responses = ResponseSet(
                q1, q2, _agreement(t, rng), _agreement(t, rng), _agreement(t, rng)
            )
            verdict = infer_action(table, responses)
            if verdict.action is Action.NOP:
                decision = "ignore"
            else:
                accept = rng.random() < params.accept_probs.get(verdict.action.value, 0.8)
                if not accept:
                    decision = "ignore"
                elif verdict.action is Action.UNFRIEND_OR_SANDBOX:
                    decision = (
                        "sandbox" if rng.random() < params.sandbox_share else "unfriend"
                    )
                else:
                    decision = verdict.action.value.lower()
            truth[(u, f)] = GroundTruthRecord(t, responses, decision)

    users = {
        uid: UserProfile(
            id=uid,
            current_city=profile["current_city"],
            hometown=profile["hometown"],
            schools=frozenset(profile["schools"]),
            employers=frozenset(profile["employers"]),
            friend_ids=frozenset(profile["friends"]),
        )
        for uid, profile in profiles.items()
    }
    snapshot = SocialSnapshot(users=users, posts=tuple(posts), photos=tuple(photos))
    return snapshot, GroundTruth(truth)


def labeled_dataset(
    snapshot: SocialSnapshot, truth: GroundTruth, target_names: list[str]
) -> dict[str, list[LabeledInstance]]:
    """Feature/label pairs per target, one instance per edge.

    Features are computed once per pair and shared across targets.
    """
    for name in target_names:
        if name not in TARGETS:
            raise ValueError(f"unknown target {name!r}")
    datasets: dict[str, list[LabeledInstance]] = {name: [] for name in target_names}
    for (u, f), rec in sorted(truth.records.items()):
        features = compute_features(snapshot, u, f)
        for name in target_names:
            if name == "Decision":
                label = rec.decision
            else:
                label = rec.responses.answer(int(name[1])).value
            datasets[name].append(
                LabeledInstance(features=features, label=label, origin_id=f"{u}|{f}")
            )
    return datasets


def labeled_instances(
    snapshot: SocialSnapshot, truth: GroundTruth, target_name: str
) -> list[LabeledInstance]:
    return labeled_dataset(snapshot, truth, [target_name])[target_name]
