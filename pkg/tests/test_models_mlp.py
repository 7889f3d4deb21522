import numpy as np
import pytest

from krklab.models import MlpConfig, NonFiniteLossError, train_mlp
from krklab.models.mlp import loss_and_gradients
from krklab.netscript import NetworkTopology, ShapeError

from conftest import toy_matrix


def xor_matrix():
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
    y = np.array([0, 1, 1, 0])
    return toy_matrix(X, y)


class TestTraining:
    def test_xor(self):
        cfg = MlpConfig(NetworkTopology.dense((2, 4, 2)), learning_rate=0.5,
                        iterations=3000, init_scale=1.0, batch_size=1, seed=1)
        model = train_mlp(xor_matrix(), cfg)
        idx, _ = model.predict_batch(xor_matrix().features)
        assert np.array_equal(idx, np.array([0, 1, 1, 0]))

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        m = toy_matrix(rng.normal(0, 1, (50, 4)), rng.integers(0, 3, 50))
        cfg = MlpConfig(NetworkTopology.dense((4, 8, 3)), iterations=5, seed=11)
        a = train_mlp(m, cfg)
        b = train_mlp(m, cfg)
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)

    def test_input_width_mismatch(self):
        m = xor_matrix()
        with pytest.raises(ShapeError):
            train_mlp(m, MlpConfig(NetworkTopology.dense((3, 4, 2))))

    def test_output_width_mismatch(self):
        m = xor_matrix()
        with pytest.raises(ShapeError):
            train_mlp(m, MlpConfig(NetworkTopology.dense((2, 4, 5))))

    def test_divergence_raises(self):
        rng = np.random.default_rng(0)
        m = toy_matrix(rng.normal(0, 1, (20, 3)), rng.integers(0, 3, 20))
        with pytest.raises(NonFiniteLossError):
            train_mlp(m, MlpConfig(NetworkTopology.dense((3, 4, 3)),
                                   learning_rate=1e308, iterations=6,
                                   batch_size=1, seed=0))

    def test_bad_config(self):
        topo = NetworkTopology.dense((2, 4, 2))
        with pytest.raises(ValueError):
            MlpConfig(topo, learning_rate=0)
        with pytest.raises(ValueError):
            MlpConfig(topo, batch_size=0)
        with pytest.raises(ValueError):
            MlpConfig(topo, output_loss="hinge")


class TestGradients:
    @pytest.mark.parametrize("output_loss", ["sigmoid_ce", "softmax_ce"])
    def test_three_layer_finite_differences(self, output_loss):
        rng = np.random.default_rng(7)
        sizes = (4, 6, 5, 3)
        ws = [rng.normal(0, 0.5, (sizes[l], sizes[l + 1])) for l in range(3)]
        bs = [rng.normal(0, 0.1, sizes[l + 1]) for l in range(3)]
        x = rng.normal(0, 1, 4)
        y = np.eye(3)[1]
        _, grads_w, grads_b = loss_and_gradients(ws, bs, x, y, output_loss)
        eps = 1e-6
        worst = 0.0
        for l in range(3):
            it = np.nditer(ws[l], flags=["multi_index"])
            for _ in it:
                i = it.multi_index
                wp = [w.copy() for w in ws]
                wm = [w.copy() for w in ws]
                wp[l][i] += eps
                wm[l][i] -= eps
                lp, _, _ = loss_and_gradients(wp, bs, x, y, output_loss)
                lm, _, _ = loss_and_gradients(wm, bs, x, y, output_loss)
                worst = max(worst, abs((lp - lm) / (2 * eps) - grads_w[l][i]))
            for j in range(sizes[l + 1]):
                bp = [b.copy() for b in bs]
                bm = [b.copy() for b in bs]
                bp[l][j] += eps
                bm[l][j] -= eps
                lp, _, _ = loss_and_gradients(ws, bp, x, y, output_loss)
                lm, _, _ = loss_and_gradients(ws, bm, x, y, output_loss)
                worst = max(worst, abs((lp - lm) / (2 * eps) - grads_b[l][j]))
        assert worst <= 1e-5

    def test_fused_loop_matches_reference_updates(self):
        # one unshuffled epoch of batch-1 training must equal a manual replay
        # of the reference per-sample gradients
        rng = np.random.default_rng(5)
        X = rng.normal(0, 1, (40, 6))
        y = rng.integers(0, 4, 40)
        m = toy_matrix(X, y)
        for output_loss in ("sigmoid_ce", "softmax_ce"):
            for momentum in (0.0, 0.9):
                cfg = MlpConfig(NetworkTopology.dense((6, 5, 4)), learning_rate=0.2,
                                iterations=1, momentum=momentum, shuffle=False,
                                batch_size=1, output_loss=output_loss, seed=3)
                model = train_mlp(m, cfg)

                r2 = np.random.default_rng(3)
                sizes = (6, 5, 4)
                ws = [r2.uniform(-0.05, 0.05, size=(sizes[l], sizes[l + 1]))
                      for l in range(2)]
                bs = [np.zeros(sizes[l + 1]) for l in range(2)]
                vw = [np.zeros_like(w) for w in ws]
                vb = [np.zeros_like(b) for b in bs]
                Y = np.eye(4)[y]
                for i in range(40):
                    _, gw, gb = loss_and_gradients(ws, bs, X[i], Y[i], output_loss)
                    for l in range(2):
                        if momentum > 0:
                            vw[l] = momentum * vw[l] - 0.2 * gw[l]
                            ws[l] = ws[l] + vw[l]
                            vb[l] = momentum * vb[l] - 0.2 * gb[l]
                            bs[l] = bs[l] + vb[l]
                        else:
                            ws[l] = ws[l] - 0.2 * gw[l]
                            bs[l] = bs[l] - 0.2 * gb[l]
                for l in range(2):
                    assert np.allclose(model.weights[l], ws[l], atol=1e-12)
                    assert np.allclose(model.biases[l], bs[l], atol=1e-12)


class TestScores:
    def test_sigmoid_scores_in_open_interval(self):
        m = xor_matrix()
        model = train_mlp(m, MlpConfig(NetworkTopology.dense((2, 3, 2)),
                                       iterations=5, batch_size=1))
        _, scores = model.predict_batch(m.features)
        assert np.all(scores > 0.0) and np.all(scores < 1.0)

    def test_softmax_scores_sum_to_one(self):
        m = xor_matrix()
        model = train_mlp(m, MlpConfig(NetworkTopology.dense((2, 3, 2)),
                                       iterations=5, output_loss="softmax_ce",
                                       batch_size=1))
        _, scores = model.predict_batch(m.features)
        assert np.allclose(scores.sum(axis=1), 1.0, atol=1e-9)

    def test_loss_curve_length(self):
        m = xor_matrix()
        model = train_mlp(m, MlpConfig(NetworkTopology.dense((2, 3, 2)),
                                       iterations=7, batch_size=2))
        assert len(model.loss_curve) == 7
        assert all(np.isfinite(v) for v in model.loss_curve)
