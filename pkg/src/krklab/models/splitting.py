"""Randomized axis-aligned split search shared by the tree-based models."""

from __future__ import annotations

import numpy as np


def class_histogram(labels: np.ndarray, n_classes: int) -> np.ndarray:
    return np.bincount(labels, minlength=n_classes).astype(np.int64)


def gini_impurity(hist: np.ndarray) -> float:
    n = hist.sum()
    if n == 0:
        return 0.0
    p = hist / n
    return float(1.0 - np.sum(p * p))


def entropy_cost(hist: np.ndarray) -> float:
    """Size-weighted entropy |S| * H(S) in nats, the jungle objective term."""
    n = hist.sum()
    if n == 0:
        return 0.0
    nz = hist[hist > 0].astype(np.float64)
    return float(n * np.log(n) - np.sum(nz * np.log(nz)))


def sample_candidates(X: np.ndarray, rng: np.random.Generator,
                      n_candidates: int) -> tuple[np.ndarray, np.ndarray]:
    """Random (feature, threshold) pairs with thresholds drawn uniformly
    strictly inside each feature's value range at this node.  Candidates on
    locally constant features are dropped."""
    n_features = X.shape[1]
    feats = rng.integers(0, n_features, size=n_candidates)
    lo = X[:, feats].min(axis=0)
    hi = X[:, feats].max(axis=0)
    thresholds = lo + (hi - lo) * rng.random(n_candidates)
    valid = hi > lo
    return feats[valid], thresholds[valid]


def left_histograms(X: np.ndarray, y_onehot: np.ndarray,
                    feats: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Class histograms of each candidate's left branch (x[f] <= t)."""
    left_mask = (X[:, feats] <= thresholds).astype(np.float64)  # n x C
    return np.rint(left_mask.T @ y_onehot).astype(np.int64)     # C x K


def best_split_by_gini(X: np.ndarray, y_onehot: np.ndarray, rng: np.random.Generator,
                       n_candidates: int):
    """The candidate (feature, threshold) minimizing the size-weighted child
    Gini impurity, or None when no candidate separates the node."""
    feats, thresholds = sample_candidates(X, rng, n_candidates)
    if feats.size == 0:
        return None
    total = np.rint(y_onehot.sum(axis=0)).astype(np.int64)
    n = X.shape[0]
    lefts = left_histograms(X, y_onehot, feats, thresholds)
    rights = total[None, :] - lefts
    nl = lefts.sum(axis=1)
    nr = n - nl
    gini_l = 1.0 - np.sum((lefts / np.maximum(nl, 1)[:, None]) ** 2, axis=1)
    gini_r = 1.0 - np.sum((rights / np.maximum(nr, 1)[:, None]) ** 2, axis=1)
    weighted = (nl * gini_l + nr * gini_r) / n
    best = int(np.argmin(weighted))
    return int(feats[best]), float(thresholds[best]), float(weighted[best])
