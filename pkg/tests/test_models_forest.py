import numpy as np
import pytest

from krklab.models import DecisionForestConfig, train_decision_forest
from krklab.models.splitting import gini_impurity, class_histogram

from conftest import toy_matrix


def unique_rows_dataset(n=120, seed=4):
    rng = np.random.default_rng(seed)
    X = np.unique(rng.integers(1, 9, (n, 6)).astype(float), axis=0)
    y = rng.integers(0, 3, X.shape[0])
    return toy_matrix(X, y)


class TestTraining:
    def test_single_unbagged_tree_memorizes(self):
        m = unique_rows_dataset()
        model = train_decision_forest(
            m, DecisionForestConfig(n_trees=1, max_depth=64, n_random_splits=64,
                                    bootstrap=False)
        )
        idx, _ = model.predict_batch(m.features)
        assert np.mean(idx == m.labels) == 1.0

    def test_root_splits_on_the_determining_feature(self):
        # feature 2 fully determines the class; noise elsewhere
        rng = np.random.default_rng(9)
        X = rng.normal(0, 1, (200, 4))
        X[:, 2] = rng.integers(0, 2, 200)
        y = X[:, 2].astype(np.int64)
        m = toy_matrix(X, y)

        # oracle: enumerate splits on every feature at every midpoint and
        # verify feature 2 holds the maximum impurity decrease
        best = {}
        parent = gini_impurity(class_histogram(m.labels, 2))
        for f in range(4):
            values = np.unique(X[:, f])
            for t in (values[:-1] + values[1:]) / 2:
                left = m.labels[X[:, f] <= t]
                right = m.labels[X[:, f] > t]
                w = (
                    left.size * gini_impurity(class_histogram(left, 2))
                    + right.size * gini_impurity(class_histogram(right, 2))
                ) / 200
                best[f] = max(best.get(f, 0.0), parent - w)
        assert max(best, key=best.get) == 2

        model = train_decision_forest(
            m, DecisionForestConfig(n_trees=1, max_depth=8, n_random_splits=256,
                                    bootstrap=False)
        )
        assert model.trees[0].feature[0] == 2

    def test_node_counts_equal_children_sums(self):
        m = unique_rows_dataset(seed=6)
        model = train_decision_forest(
            m, DecisionForestConfig(n_trees=3, max_depth=10, n_random_splits=32)
        )
        for tree in model.trees:
            for node in range(len(tree.feature)):
                if tree.feature[node] < 0:
                    continue
                total = tree.hist[node].sum()
                assert total == (
                    tree.hist[tree.left[node]].sum() + tree.hist[tree.right[node]].sum()
                )

    def test_deterministic(self):
        m = unique_rows_dataset(seed=8)
        cfg = DecisionForestConfig(n_trees=4, max_depth=12, n_random_splits=16, seed=3)
        a = train_decision_forest(m, cfg)
        b = train_decision_forest(m, cfg)
        assert a.predict_scores(m.features).tolist() == b.predict_scores(m.features).tolist()

    def test_depth_limit_respected(self):
        m = unique_rows_dataset(seed=10)
        model = train_decision_forest(
            m, DecisionForestConfig(n_trees=1, max_depth=2, n_random_splits=16,
                                    bootstrap=False)
        )
        tree = model.trees[0]

        def depth(node):
            if tree.feature[node] < 0:
                return 0
            return 1 + max(depth(tree.left[node]), depth(tree.right[node]))

        assert depth(0) <= 2

    def test_bad_config(self):
        with pytest.raises(ValueError):
            DecisionForestConfig(n_trees=0)
        with pytest.raises(ValueError):
            DecisionForestConfig(bagging_fraction=0.0)


class TestPrediction:
    def test_scores_are_mean_leaf_distributions(self):
        m = unique_rows_dataset(seed=12)
        model = train_decision_forest(
            m, DecisionForestConfig(n_trees=5, max_depth=6, n_random_splits=16)
        )
        scores = model.predict_scores(m.features)
        assert np.allclose(scores.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(scores >= 0)

    def test_batch_matches_single(self):
        m = unique_rows_dataset(seed=14)
        model = train_decision_forest(
            m, DecisionForestConfig(n_trees=2, max_depth=6, n_random_splits=16)
        )
        _, batch_scores = model.predict_batch(m.features[:5])
        for i in range(5):
            _, single = model.predict(m.features[i])
            assert np.array_equal(single, batch_scores[i])
