"""Classifiers over mutual-activity features: decision tree and random forest.

Also the evaluation pipeline pieces the classifiers need: minority-class
duplication (exact copies, never synthetic interpolation), origin-grouped
fold assignment so duplicates never straddle a train/test split, and
k-fold cross-validation with pooled confusion matrices.

Everything is deterministic under an explicit seed. Tree splits use Gini
impurity with exhaustive midpoint threshold search; ties break toward the
lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field, replace

import numpy as np

from friendaudit.domain import AgreementAnswer, FrequencyAnswer, FriendAuditError
from friendaudit.features import FEATURE_NAMES, FeatureVector
from friendaudit.metrics import ClassMetrics, ConfusionMatrix, class_metrics, confusion_matrix


class EmptyClassError(FriendAuditError):
    pass


class TooFewGroupsError(FriendAuditError):
    pass


class ModelFormatError(FriendAuditError):
    pass


@dataclass(frozen=True)
class PredictionTarget:
    """What is being predicted: a questionnaire answer or the user decision."""

    name: str
    classes: tuple[str, ...]


FREQUENCY_CLASSES = tuple(a.value for a in FrequencyAnswer)
AGREEMENT_CLASSES = tuple(a.value for a in AgreementAnswer)
DECISION_CLASSES = ("unfriend", "sandbox", "restrict", "unfollow", "ignore")

TARGETS = {
    "Q1": PredictionTarget("Q1", FREQUENCY_CLASSES),
    "Q2": PredictionTarget("Q2", FREQUENCY_CLASSES),
    "Q3": PredictionTarget("Q3", AGREEMENT_CLASSES),
    "Q4": PredictionTarget("Q4", AGREEMENT_CLASSES),
    "Q5": PredictionTarget("Q5", AGREEMENT_CLASSES),
    "Decision": PredictionTarget("Decision", DECISION_CLASSES),
}


@dataclass(frozen=True)
class LabeledInstance:
    features: FeatureVector
    label: str
    origin_id: str
    weight: int = 1


def balance_dataset(data: list[LabeledInstance], seed: int) -> list[LabeledInstance]:
    """Duplicate minority-class instances up to the majority-class count.

    Duplicates are exact copies sharing the original's origin_id. For each
    minority class the originals are visited round-robin in a seeded
    shuffled order, so the output is deterministic under the seed.
    """
    by_class: dict[str, list[LabeledInstance]] = defaultdict(list)
    for inst in data:
        by_class[inst.label].append(inst)
    if not by_class or any(not members for members in by_class.values()):
        raise EmptyClassError("every class needs at least one instance")
    majority = max(len(members) for members in by_class.values())
    rng = np.random.default_rng(seed)
    out = list(data)
    for label in sorted(by_class):
        members = by_class[label]
        deficit = majority - len(members)
        if deficit == 0:
            continue
        order = rng.permutation(len(members))
        for i in range(deficit):
            original = members[order[i % len(members)]]
            out.append(replace(original, weight=original.weight))
    return out


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    fold_of: dict[str, int]

    def fold_for(self, inst: LabeledInstance) -> int:
        return self.fold_of[inst.origin_id]


def make_folds(data: list[LabeledInstance], k: int, seed: int) -> FoldAssignment:
    """Assign origin groups (not instances) to k folds.

    Stratified by each group's label where sizes permit: groups are dealt
    round-robin within a label-sorted, seed-shuffled order, so group counts
    per fold differ by at most one overall.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    groups: dict[str, str] = {}
    for inst in data:
        groups.setdefault(inst.origin_id, inst.label)
    if len(groups) < k:
        raise TooFewGroupsError(f"{len(groups)} origin groups < k={k}")
    rng = np.random.default_rng(seed)
    by_label: dict[str, list[str]] = defaultdict(list)
    for origin_id in sorted(groups):
        by_label[groups[origin_id]].append(origin_id)
    dealt: list[str] = []
    for label in sorted(by_label):
        ids = by_label[label]
        order = rng.permutation(len(ids))
        dealt.extend(ids[i] for i in order)
    fold_of = {origin_id: i % k for i, origin_id in enumerate(dealt)}
    return FoldAssignment(k, fold_of)


# -- Decision tree ----------------------------------------------------------


@dataclass(frozen=True)
class TreeParams:
    max_depth: int | None = None
    min_leaf_size: int = 1


@dataclass
class TreeNode:
    # Leaf: distribution set, feature is None. Split: feature/threshold set,
    # left holds rows with value <= threshold.
    distribution: tuple[float, ...] | None = None
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class TreeModel:
    target: PredictionTarget
    params: TreeParams
    root: TreeNode


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p * p).sum())


def _best_split(
    x: np.ndarray, y: np.ndarray, n_classes: int, feature_indices: np.ndarray
) -> tuple[int, float] | None:
    """Exhaustive Gini search over midpoint thresholds of candidate features.

    Returns (feature, threshold) of the best impurity decrease, or None if
    no split improves on the parent. Tie-break: lowest feature index, then
    lowest threshold (guaranteed by scan order and strict improvement).
    """
    n = len(y)
    parent_counts = np.bincount(y, minlength=n_classes)
    parent_gini = _gini(parent_counts)
    best_gain = 1e-12
    best: tuple[int, float] | None = None
    for feat in feature_indices:
        values = x[:, feat]
        order = np.argsort(values, kind="stable")
        sorted_vals = values[order]
        sorted_y = y[order]
        # one-hot cumulative class counts for every left-prefix
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), sorted_y] = 1.0
        left_counts = np.cumsum(onehot, axis=0)
        distinct = np.nonzero(sorted_vals[1:] > sorted_vals[:-1])[0]
        if len(distinct) == 0:
            continue
        left_n = (distinct + 1).astype(float)
        right_n = n - left_n
        lc = left_counts[distinct]
        rc = parent_counts - lc
        gini_left = 1.0 - ((lc / left_n[:, None]) ** 2).sum(axis=1)
        gini_right = 1.0 - ((rc / right_n[:, None]) ** 2).sum(axis=1)
        weighted = (left_n * gini_left + right_n * gini_right) / n
        gains = parent_gini - weighted
        idx = int(np.argmax(gains))
        if gains[idx] > best_gain:
            best_gain = float(gains[idx])
            cut = distinct[idx]
            threshold = (sorted_vals[cut] + sorted_vals[cut + 1]) / 2.0
            best = (int(feat), float(threshold))
    return best


def _grow(
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    params: TreeParams,
    depth: int,
    rng: np.random.Generator | None,
    features_per_split: int,
) -> TreeNode:
    counts = np.bincount(y, minlength=n_classes)
    stop = (
        len(y) < 2 * params.min_leaf_size
        or counts.max() == len(y)
        or (params.max_depth is not None and depth >= params.max_depth)
    )
    split = None
    if not stop:
        if rng is not None and features_per_split < x.shape[1]:
            candidates = np.sort(
                rng.choice(x.shape[1], size=features_per_split, replace=False)
            )
        else:
            candidates = np.arange(x.shape[1])
        split = _best_split(x, y, n_classes, candidates)
    if split is None:
        total = counts.sum()
        return TreeNode(distribution=tuple(float(c) / total for c in counts))
    feat, threshold = split
    mask = x[:, feat] <= threshold
    if mask.sum() < params.min_leaf_size or (~mask).sum() < params.min_leaf_size:
        total = counts.sum()
        return TreeNode(distribution=tuple(float(c) / total for c in counts))
    left = _grow(x[mask], y[mask], n_classes, params, depth + 1, rng, features_per_split)
    right = _grow(x[~mask], y[~mask], n_classes, params, depth + 1, rng, features_per_split)
    return TreeNode(feature=feat, threshold=threshold, left=left, right=right)


def _as_arrays(
    data: list[LabeledInstance], target: PredictionTarget
) -> tuple[np.ndarray, np.ndarray]:
    class_index = {c: i for i, c in enumerate(target.classes)}
    x = np.array([inst.features.as_row() for inst in data], dtype=float)
    y = np.array([class_index[inst.label] for inst in data], dtype=int)
    return x, y


def train_tree(
    data: list[LabeledInstance],
    target: PredictionTarget,
    params: TreeParams = TreeParams(),
) -> TreeModel:
    """Greedy top-down Gini tree; deterministic for identical data+params."""
    if not data:
        raise ValueError("training data is empty")
    x, y = _as_arrays(data, target)
    root = _grow(x, y, len(target.classes), params, 0, None, x.shape[1])
    return TreeModel(target=target, params=params, root=root)


def _tree_distribution(node: TreeNode, row: tuple[float, ...]) -> tuple[float, ...]:
    while not node.is_leaf:
        assert node.threshold is not None and node.left and node.right
        node = node.left if row[node.feature] <= node.threshold else node.right
    assert node.distribution is not None
    return node.distribution


# -- Random forest ----------------------------------------------------------


@dataclass(frozen=True)
class ForestParams:
    tree_count: int = 100
    features_per_split: int = 3  # ceil(sqrt(7))
    seed: int = 0
    bootstrap: bool = True
    tree_params: TreeParams = field(default_factory=TreeParams)

    def __post_init__(self) -> None:
        if self.tree_count < 1:
            raise ValueError("tree_count must be >= 1")
        if not 1 <= self.features_per_split <= len(FEATURE_NAMES):
            raise ValueError("features_per_split must be in 1..7")


@dataclass
class ForestModel:
    target: PredictionTarget
    params: ForestParams
    trees: list[TreeModel]


def train_forest(
    data: list[LabeledInstance], target: PredictionTarget, params: ForestParams
) -> ForestModel:
    """Seeded bagging: bootstrap samples per tree, feature subsets per split."""
    if not data:
        raise ValueError("training data is empty")
    x, y = _as_arrays(data, target)
    master = np.random.default_rng(params.seed)
    trees = []
    for _ in range(params.tree_count):
        tree_rng = np.random.default_rng(master.integers(2**63))
        if params.bootstrap:
            idx = tree_rng.integers(len(data), size=len(data))
            bx, by = x[idx], y[idx]
        else:
            bx, by = x, y
        root = _grow(
            bx, by, len(target.classes), params.tree_params, 0, tree_rng,
            params.features_per_split,
        )
        trees.append(TreeModel(target=target, params=params.tree_params, root=root))
    return ForestModel(target=target, params=params, trees=trees)


Model = TreeModel | ForestModel


def predict(model: Model, features: FeatureVector) -> tuple[str, tuple[float, ...]]:
    """Predicted label and a class distribution summing to 1.

    Trees return the leaf distribution; forests vote (one vote per tree's
    argmax), with argmax ties broken by class order in the target.
    """
    row = features.as_row()
    classes = model.target.classes
    if isinstance(model, TreeModel):
        dist = _tree_distribution(model.root, row)
    else:
        votes = np.zeros(len(classes))
        for tree in model.trees:
            tree_dist = _tree_distribution(tree.root, row)
            votes[int(np.argmax(tree_dist))] += 1.0
        dist = tuple(float(v) / len(model.trees) for v in votes)
    label = classes[int(np.argmax(dist))]
    return label, dist


# -- Serialization ----------------------------------------------------------

MODEL_FORMAT_VERSION = 1


def _node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"leaf": list(node.distribution)}  # type: ignore[arg-type]
    assert node.left and node.right
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(data: dict) -> TreeNode:
    if "leaf" in data:
        return TreeNode(distribution=tuple(data["leaf"]))
    return TreeNode(
        feature=data["feature"],
        threshold=data["threshold"],
        left=_node_from_dict(data["left"]),
        right=_node_from_dict(data["right"]),
    )


def model_to_text(model: Model) -> str:
    doc: dict = {
        "format_version": MODEL_FORMAT_VERSION,
        "target": {"name": model.target.name, "classes": list(model.target.classes)},
    }
    if isinstance(model, TreeModel):
        doc["kind"] = "tree"
        doc["params"] = {
            "max_depth": model.params.max_depth,
            "min_leaf_size": model.params.min_leaf_size,
        }
        doc["root"] = _node_to_dict(model.root)
    else:
        doc["kind"] = "forest"
        doc["params"] = {
            "tree_count": model.params.tree_count,
            "features_per_split": model.params.features_per_split,
            "seed": model.params.seed,
            "bootstrap": model.params.bootstrap,
            "max_depth": model.params.tree_params.max_depth,
            "min_leaf_size": model.params.tree_params.min_leaf_size,
        }
        doc["trees"] = [_node_to_dict(t.root) for t in model.trees]
    return json.dumps(doc, sort_keys=True, indent=1)


def model_from_text(text: str) -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid model document: {exc.msg}") from exc
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {doc.get('format_version')}")
    target = PredictionTarget(doc["target"]["name"], tuple(doc["target"]["classes"]))
    params = doc["params"]
    if doc["kind"] == "tree":
        tree_params = TreeParams(params["max_depth"], params["min_leaf_size"])
        return TreeModel(target, tree_params, _node_from_dict(doc["root"]))
    if doc["kind"] == "forest":
        tree_params = TreeParams(params["max_depth"], params["min_leaf_size"])
        forest_params = ForestParams(
            tree_count=params["tree_count"],
            features_per_split=params["features_per_split"],
            seed=params["seed"],
            bootstrap=params["bootstrap"],
            tree_params=tree_params,
        )
        trees = [
            TreeModel(target, tree_params, _node_from_dict(t)) for t in doc["trees"]
        ]
        return ForestModel(target, forest_params, trees)
    raise ModelFormatError(f"unknown model kind {doc.get('kind')!r}")


# -- Cross-validation -------------------------------------------------------


@dataclass
class EvaluationReport:
    target: PredictionTarget
    algo: str
    k: int
    seed: int
    params: dict
    matrix: ConfusionMatrix
    metrics: ClassMetrics
    fold_sizes: list[int]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "target": self.target.name,
            "classes": list(self.target.classes),
            "algo": self.algo,
            "k": self.k,
            "seed": self.seed,
            "params": self.params,
            "confusion_matrix": self.matrix.to_dict(),
            "metrics": self.metrics.to_dict(),
            "fold_sizes": self.fold_sizes,
            "notes": self.notes,
        }

    def to_text(self) -> str:
        lines = [
            f"target={self.target.name} algo={self.algo} k={self.k} seed={self.seed}",
            f"params={json.dumps(self.params, sort_keys=True)}",
            f"fold sizes: {self.fold_sizes}",
            "",
            self.matrix.to_text(),
            "",
            self.metrics.to_text(),
        ]
        lines.extend(self.notes)
        return "\n".join(lines)


def cross_validate(
    data: list[LabeledInstance],
    target: PredictionTarget,
    algo: str,
    k: int,
    seed: int,
    tree_params: TreeParams = TreeParams(),
    forest_params: ForestParams | None = None,
) -> EvaluationReport:
    """Balance, assign origin-grouped folds, then train/test k times.

    The confusion matrix pools the held-out predictions of every fold.
    Balancing happens before fold assignment; duplicates inherit their
    origin's fold so no origin group ever spans a train/test boundary.
    """
    if algo not in ("tree", "forest"):
        raise ValueError(f"unknown algorithm {algo!r}")
    balanced = balance_dataset(data, seed)
    folds = make_folds(balanced, k, seed)
    pairs: list[tuple[str, str]] = []
    fold_sizes = []
    for fold in range(k):
        train = [inst for inst in balanced if folds.fold_for(inst) != fold]
        test = [inst for inst in balanced if folds.fold_for(inst) == fold]
        fold_sizes.append(len(test))
        if algo == "tree":
            model: Model = train_tree(train, target, tree_params)
            params: dict = {
                "max_depth": tree_params.max_depth,
                "min_leaf_size": tree_params.min_leaf_size,
            }
        else:
            fp = forest_params or ForestParams(seed=seed)
            fp = replace(fp, seed=fp.seed + fold)
            model = train_forest(train, target, fp)
            params = {
                "tree_count": fp.tree_count,
                "features_per_split": fp.features_per_split,
                "bootstrap": fp.bootstrap,
                "max_depth": fp.tree_params.max_depth,
                "min_leaf_size": fp.tree_params.min_leaf_size,
            }
        for inst in test:
            label, _ = predict(model, inst.features)
            pairs.append((inst.label, label))
    matrix = confusion_matrix(pairs, list(target.classes))
    report = EvaluationReport(
        target=target,
        algo=algo,
        k=k,
        seed=seed,
        params=params,
        matrix=matrix,
        metrics=class_metrics(matrix),
        fold_sizes=fold_sizes,
        notes=[
            "balancing by exact duplication precedes fold assignment",
            "folds are stratified by origin label and grouped by origin_id",
        ],
    )
    return report
