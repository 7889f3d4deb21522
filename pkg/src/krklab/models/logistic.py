"""Multinomial logistic regression fitted by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..dataset import EncodedMatrix
from .base import NonFiniteLossError, TrainedModel, clamped_log, one_hot, softmax


@dataclass(frozen=True)
class LogisticRegressionConfig:
    learning_rate: float = 0.3
    iterations: int = 500
    l2_weight: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.iterations <= 0 or self.l2_weight < 0:
            raise ValueError("learning_rate and iterations must be positive, l2_weight nonnegative")


def loss_and_gradient(weights: np.ndarray, bias: np.ndarray, X: np.ndarray,
                      Y: np.ndarray, l2_weight: float):
    """Mean cross-entropy of softmax(XW + b) plus an L2 penalty on the
    weights (not the bias), with its analytic gradient."""
    n = X.shape[0]
    with np.errstate(over="ignore"):  # divergence surfaces as a non-finite loss
        probs = softmax(X @ weights + bias)
        loss = -np.sum(Y * clamped_log(probs)) / n + 0.5 * l2_weight * np.sum(weights**2)
        delta = (probs - Y) / n
        grad_w = X.T @ delta + l2_weight * weights
        grad_b = delta.sum(axis=0)
    return loss, grad_w, grad_b


class LogisticRegressionModel(TrainedModel):
    kind = "logistic_regression"

    def __init__(self, weights: np.ndarray, bias: np.ndarray, loss_curve: list[float],
                 **common):
        super().__init__(**common)
        self.weights = weights
        self.bias = bias
        self.loss_curve = loss_curve

    @property
    def input_width(self) -> int:
        return self.weights.shape[0]

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        return softmax(X @ self.weights + self.bias)

    def payload(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias.tolist()}

    @classmethod
    def from_payload(cls, payload, class_order, encoding_fingerprint, config):
        return cls(
            np.array(payload["weights"], dtype=np.float64),
            np.array(payload["bias"], dtype=np.float64),
            loss_curve=[],
            class_order=tuple(class_order),
            encoding_fingerprint=encoding_fingerprint,
            config=config,
        )


def train_logistic_regression(train: EncodedMatrix,
                              cfg: LogisticRegressionConfig) -> LogisticRegressionModel:
    """Full-batch gradient descent on the softmax cross-entropy objective.

    Deterministic: weights start at zero, so the seed only participates in
    the config fingerprint.  Divergence (non-finite loss) is an error.
    """
    if train.n_samples == 0:
        raise ValueError("empty training set")
    X = train.features
    Y = one_hot(train.labels, train.n_classes)
    weights = np.zeros((X.shape[1], train.n_classes))
    bias = np.zeros(train.n_classes)
    losses = []
    for _ in range(cfg.iterations):
        loss, grad_w, grad_b = loss_and_gradient(weights, bias, X, Y, cfg.l2_weight)
        if not np.isfinite(loss):
            raise NonFiniteLossError(f"loss diverged at iteration {len(losses)}")
        losses.append(loss)
        weights -= cfg.learning_rate * grad_w
        bias -= cfg.learning_rate * grad_b
    return LogisticRegressionModel(
        weights, bias, losses,
        class_order=train.class_order,
        encoding_fingerprint=train.encoding.fingerprint(),
        config=asdict(cfg),
    )
