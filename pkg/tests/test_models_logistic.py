import numpy as np
import pytest

from krklab.models import (
    LogisticRegressionConfig,
    LogisticRegressionModel,
    NonFiniteLossError,
    train_logistic_regression,
)
from krklab.models.logistic import loss_and_gradient
from krklab.netscript import ShapeError

from conftest import toy_matrix


def separable_two_class(n=30, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(-2, 0.3, (n, 2)), rng.normal(2, 0.3, (n, 2))])
    y = np.array([0] * n + [1] * n)
    return toy_matrix(X, y)


class TestTraining:
    def test_separable_reaches_full_accuracy(self):
        m = separable_two_class()
        model = train_logistic_regression(m, LogisticRegressionConfig(iterations=300))
        idx, _ = model.predict_batch(m.features)
        assert np.mean(idx == m.labels) == 1.0

    def test_loss_monotone_under_small_rate(self):
        m = separable_two_class()
        model = train_logistic_regression(
            m, LogisticRegressionConfig(learning_rate=0.05, iterations=200)
        )
        diffs = np.diff(model.loss_curve)
        assert np.all(diffs <= 1e-12)

    def test_deterministic(self):
        m = separable_two_class()
        cfg = LogisticRegressionConfig(iterations=50, seed=5)
        a = train_logistic_regression(m, cfg)
        b = train_logistic_regression(m, cfg)
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.bias, b.bias)

    def test_divergence_raises(self):
        rng = np.random.default_rng(0)
        m = toy_matrix(rng.normal(0, 1, (20, 3)), rng.integers(0, 3, 20))
        with pytest.raises(NonFiniteLossError):
            train_logistic_regression(
                m, LogisticRegressionConfig(learning_rate=1e200, iterations=5)
            )

    def test_empty_training_set_rejected(self):
        m = separable_two_class().subset(np.array([], dtype=int))
        with pytest.raises(ValueError):
            train_logistic_regression(m, LogisticRegressionConfig())

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            LogisticRegressionConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            LogisticRegressionConfig(l2_weight=-1.0)


class TestGradient:
    def test_matches_central_finite_differences(self):
        rng = np.random.default_rng(12)
        for _ in range(3):
            d, k, n = 4, 3, 5
            W = rng.normal(0, 0.5, (d, k))
            b = rng.normal(0, 0.5, k)
            X = rng.normal(0, 1, (n, d))
            Y = np.eye(k)[rng.integers(0, k, n)]
            _, grad_w, grad_b = loss_and_gradient(W, b, X, Y, 0.01)
            eps = 1e-6
            for i in range(d):
                for j in range(k):
                    Wp, Wm = W.copy(), W.copy()
                    Wp[i, j] += eps
                    Wm[i, j] -= eps
                    lp, _, _ = loss_and_gradient(Wp, b, X, Y, 0.01)
                    lm, _, _ = loss_and_gradient(Wm, b, X, Y, 0.01)
                    assert abs((lp - lm) / (2 * eps) - grad_w[i, j]) <= 1e-6
            for j in range(k):
                bp, bm = b.copy(), b.copy()
                bp[j] += eps
                bm[j] -= eps
                lp, _, _ = loss_and_gradient(W, bp, X, Y, 0.01)
                lm, _, _ = loss_and_gradient(W, bm, X, Y, 0.01)
                assert abs((lp - lm) / (2 * eps) - grad_b[j]) <= 1e-6


class TestPrediction:
    def test_zero_weights_tie_break_to_first_class(self):
        model = LogisticRegressionModel(
            np.zeros((4, 3)), np.zeros(3), [],
            class_order=("first", "mid", "last"), encoding_fingerprint="", config={},
        )
        label, scores = model.predict(np.ones(4))
        assert label == "first"
        assert np.allclose(scores, 1 / 3)

    def test_scores_sum_to_one(self):
        m = separable_two_class()
        model = train_logistic_regression(m, LogisticRegressionConfig(iterations=20))
        _, scores = model.predict_batch(m.features)
        assert np.allclose(scores.sum(axis=1), 1.0, atol=1e-9)

    def test_width_mismatch(self):
        m = separable_two_class()
        model = train_logistic_regression(m, LogisticRegressionConfig(iterations=5))
        with pytest.raises(ShapeError):
            model.predict(np.ones(5))
