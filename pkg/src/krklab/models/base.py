"""Shared prediction contract and numeric helpers for the classifiers."""

from __future__ import annotations

import numpy as np

from ..dataset import CLASS_LABELS
from ..netscript import ShapeError


class NonFiniteLossError(ArithmeticError):
    """Training loss left the finite range (learning rate too high)."""


def softmax(z: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction."""
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def clamped_log(p: np.ndarray) -> np.ndarray:
    return np.log(np.clip(p, 1e-12, None))


def one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((labels.shape[0], n_classes), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def member_rng(seed: int, member: int) -> np.random.Generator:
    """Deterministic per-ensemble-member generator derived from a base seed."""
    return np.random.default_rng(np.random.SeedSequence((seed, member)))


class TrainedModel:
    """Immutable fitted classifier exposing per-class scores.

    The predicted label is the argmax of the scores with ties broken
    towards the lowest class index.
    """

    kind = "base"

    def __init__(self, class_order: tuple[str, ...] = CLASS_LABELS,
                 encoding_fingerprint: str = "", config: dict | None = None):
        self.class_order = tuple(class_order)
        self.encoding_fingerprint = encoding_fingerprint
        self.config = dict(config or {})

    @property
    def n_classes(self) -> int:
        return len(self.class_order)

    @property
    def input_width(self) -> int:
        raise NotImplementedError

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_width(self, X: np.ndarray):
        if X.ndim != 2 or X.shape[1] != self.input_width:
            raise ShapeError(
                f"expected feature rows of width {self.input_width}, got {X.shape}"
            )

    def predict_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=np.float64)
        self._check_width(X)
        scores = self.predict_scores(X)
        if not np.all(np.isfinite(scores)):
            raise NonFiniteLossError("non-finite prediction scores")
        return np.argmax(scores, axis=1), scores

    def predict(self, x) -> tuple[str, np.ndarray]:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        idx, scores = self.predict_batch(x)
        return self.class_order[int(idx[0])], scores[0]

    def payload(self) -> dict:
        """JSON-serializable learned parameters."""
        raise NotImplementedError

    @classmethod
    def from_payload(cls, payload: dict, class_order, encoding_fingerprint, config) -> "TrainedModel":
        raise NotImplementedError
