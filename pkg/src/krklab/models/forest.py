"""Bagged ensemble of randomized axis-aligned decision trees."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..dataset import EncodedMatrix
from .base import TrainedModel, member_rng, one_hot
from .splitting import best_split_by_gini, class_histogram


@dataclass(frozen=True)
class DecisionForestConfig:
    n_trees: int = 8
    max_depth: int = 32
    n_random_splits: int = 128
    bagging_fraction: float = 1.0
    bootstrap: bool = True          # with replacement; False = plain subsample
    seed: int = 0

    def __post_init__(self):
        if min(self.n_trees, self.max_depth, self.n_random_splits) < 1:
            raise ValueError("tree count, depth and split count must be positive")
        if not (0.0 < self.bagging_fraction <= 1.0):
            raise ValueError("bagging_fraction must lie in (0, 1]")


class Tree:
    """Flat-array binary tree: feature < 0 marks a leaf."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.hist: list[np.ndarray] = []

    def add_node(self, hist: np.ndarray) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.hist.append(hist)
        return len(self.feature) - 1

    def leaf_distribution(self, node: int) -> np.ndarray:
        h = self.hist[node]
        n = h.sum()
        if n == 0:
            return np.full(h.shape, 1.0 / h.shape[0])
        return h / n

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        out = np.empty((X.shape[0], self.hist[0].shape[0]))
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if rows.size == 0:
                continue
            f = self.feature[node]
            if f < 0:
                out[rows] = self.leaf_distribution(node)
                continue
            goes_left = X[rows, f] <= self.threshold[node]
            stack.append((self.left[node], rows[goes_left]))
            stack.append((self.right[node], rows[~goes_left]))
        return out

    def to_payload(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "hist": [h.tolist() for h in self.hist],
        }

    @classmethod
    def from_payload(cls, data: dict) -> "Tree":
        tree = cls()
        tree.feature = list(data["feature"])
        tree.threshold = list(data["threshold"])
        tree.left = list(data["left"])
        tree.right = list(data["right"])
        tree.hist = [np.array(h, dtype=np.int64) for h in data["hist"]]
        return tree


def _grow(tree: Tree, X: np.ndarray, y: np.ndarray, y_onehot: np.ndarray,
          depth_left: int, n_candidates: int, n_classes: int,
          rng: np.random.Generator) -> int:
    hist = class_histogram(y, n_classes)
    node = tree.add_node(hist)
    if depth_left == 0 or y.size < 2 or np.count_nonzero(hist) <= 1:
        return node
    found = best_split_by_gini(X, y_onehot, rng, n_candidates)
    if found is None:
        return node
    feature, threshold, _ = found
    goes_left = X[:, feature] <= threshold
    if not goes_left.any() or goes_left.all():
        return node
    tree.feature[node] = feature
    tree.threshold[node] = threshold
    tree.left[node] = _grow(tree, X[goes_left], y[goes_left], y_onehot[goes_left],
                            depth_left - 1, n_candidates, n_classes, rng)
    tree.right[node] = _grow(tree, X[~goes_left], y[~goes_left], y_onehot[~goes_left],
                             depth_left - 1, n_candidates, n_classes, rng)
    return node


class DecisionForestModel(TrainedModel):
    kind = "decision_forest"

    def __init__(self, trees: list[Tree], n_features: int, **common):
        super().__init__(**common)
        self.trees = trees
        self._n_features = n_features

    @property
    def input_width(self) -> int:
        return self._n_features

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            acc += tree.predict_proba(X)
        return acc / len(self.trees)

    def payload(self) -> dict:
        return {"n_features": self._n_features,
                "trees": [t.to_payload() for t in self.trees]}

    @classmethod
    def from_payload(cls, payload, class_order, encoding_fingerprint, config):
        return cls(
            [Tree.from_payload(t) for t in payload["trees"]],
            int(payload["n_features"]),
            class_order=tuple(class_order),
            encoding_fingerprint=encoding_fingerprint,
            config=config,
        )


def train_decision_forest(train: EncodedMatrix,
                          cfg: DecisionForestConfig) -> DecisionForestModel:
    """Each tree grows on a with-replacement bag of the training rows; each
    node keeps the best of `n_random_splits` random (feature, threshold)
    candidates by Gini decrease; leaves store class histograms and the
    ensemble averages the normalized leaf distributions."""
    if train.n_samples == 0:
        raise ValueError("empty training set")
    X, y = train.features, train.labels
    n = X.shape[0]
    bag_size = max(1, int(np.floor(n * cfg.bagging_fraction)))
    trees = []
    for member in range(cfg.n_trees):
        rng = member_rng(cfg.seed, member)
        if cfg.bootstrap:
            rows = rng.integers(0, n, size=bag_size)
        elif bag_size == n:
            rows = np.arange(n)
        else:
            rows = np.sort(rng.permutation(n)[:bag_size])
        Xb, yb = X[rows], y[rows]
        tree = Tree()
        _grow(tree, Xb, yb, one_hot(yb, train.n_classes), cfg.max_depth,
              cfg.n_random_splits, train.n_classes, rng)
        trees.append(tree)
    return DecisionForestModel(
        trees, X.shape[1],
        class_order=train.class_order,
        encoding_fingerprint=train.encoding.fingerprint(),
        config=asdict(cfg),
    )
