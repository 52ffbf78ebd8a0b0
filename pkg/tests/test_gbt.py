"""Boosted trees: learning, monotone enforcement, serialization, determinism."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vrstars import MonotoneBoostedTrees, TreeNode, sigmoid
from vrstars.gbt import _candidate_thresholds
from vrstars.trees import (
    TreeFormatError,
    expected_value,
    max_depth,
    route_one,
    tree_values,
    used_features,
)

from conftest import random_ensemble


class TestSigmoid:
    def test_midpoint(self):
        assert sigmoid(0.0) == 0.5

    def test_extremes_do_not_overflow(self):
        assert sigmoid(1000.0) == 1.0
        assert 0.0 < sigmoid(-50.0) < 1e-20

    def test_scalar_in_scalar_out(self):
        assert isinstance(sigmoid(1.3), float)
        assert sigmoid(np.array([0.0, 1.0])).shape == (2,)

    def test_symmetry(self):
        m = np.linspace(-5, 5, 21)
        np.testing.assert_allclose(sigmoid(m) + sigmoid(-m), 1.0, atol=1e-12)


class TestRouting:
    def tree(self):
        return TreeNode(
            cover=10,
            feature=0,
            threshold=0.5,
            left=TreeNode(cover=4, value=-1.0),
            right=TreeNode(cover=6, value=1.0),
        )

    def test_strictly_below_goes_left(self):
        t = self.tree()
        assert route_one(t, np.array([0.49])) == -1.0
        assert route_one(t, np.array([0.5])) == 1.0

    def test_vectorized_matches_single(self):
        t = self.tree()
        X = np.array([[0.0], [0.5], [1.0], [0.4999]])
        expected = [route_one(t, row) for row in X]
        assert tree_values(t, X).tolist() == expected

    def test_expected_value_is_cover_weighted(self):
        assert expected_value(self.tree()) == pytest.approx(0.4 * -1 + 0.6 * 1)

    def test_used_features_and_depth(self):
        t = self.tree()
        assert used_features(t) == {0}
        assert max_depth(t) == 1
        assert max_depth(TreeNode(cover=1, value=0.0)) == 0


class TestTreeSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        ens = random_ensemble(rng, n_features=6)
        for tree in ens.trees_:
            rebuilt = TreeNode.from_dict(tree.to_dict(), n_features=6)
            assert rebuilt.to_dict() == tree.to_dict()

    def test_cover_mismatch_rejected(self):
        obj = {
            "feature": 0,
            "threshold": 0.5,
            "cover": 10,
            "left": {"value": 0.0, "cover": 3},
            "right": {"value": 1.0, "cover": 6},
        }
        with pytest.raises(TreeFormatError, match="cover"):
            TreeNode.from_dict(obj, n_features=2)

    def test_feature_outside_schema_rejected(self):
        obj = {
            "feature": 5,
            "threshold": 0.5,
            "cover": 2,
            "left": {"value": 0.0, "cover": 1},
            "right": {"value": 1.0, "cover": 1},
        }
        with pytest.raises(TreeFormatError, match="5"):
            TreeNode.from_dict(obj, n_features=2)

    @pytest.mark.parametrize(
        "mangle",
        [
            lambda o: o.update(cover=0),
            lambda o: o.update(cover=True),
            lambda o: o.update(value="x"),
            lambda o: o.pop("cover"),
            lambda o: o.update(extra=1),
        ],
    )
    def test_bad_leaves_rejected(self, mangle):
        obj = {"value": 1.0, "cover": 3}
        mangle(obj)
        with pytest.raises(TreeFormatError):
            TreeNode.from_dict(obj, n_features=1)


class TestCandidateThresholds:
    def test_binary_column_splits_at_half(self):
        assert _candidate_thresholds(np.array([0.0, 1.0, 0.0, 1.0]), 256).tolist() == [0.5]

    def test_constant_column_has_no_candidates(self):
        assert _candidate_thresholds(np.full(10, 3.0), 256).size == 0

    def test_sparse_column_uses_adjacent_midpoints(self):
        col = np.array([1.0, 2.0, 4.0, 1.0])
        assert _candidate_thresholds(col, 256).tolist() == [1.5, 3.0]

    def test_dense_column_quantile_binned(self):
        rng = np.random.default_rng(1)
        col = rng.normal(size=5000)
        cand = _candidate_thresholds(col, 16)
        assert 1 <= cand.size <= 15
        u = np.unique(col)
        mids = (u[:-1] + u[1:]) / 2.0
        assert np.isin(cand, mids).all()


def make_xor_free_data(rng, n=400):
    """Simple additive world: two informative binaries, one noise numeric."""
    X = np.column_stack(
        [
            rng.integers(0, 2, size=n).astype(float),
            rng.integers(0, 2, size=n).astype(float),
            rng.normal(size=n),
        ]
    )
    logit = 1.5 * X[:, 0] + 0.8 * X[:, 1] - 1.2
    y = (rng.random(n) < sigmoid(logit)).astype(float)
    return X, y


class TestFitting:
    def test_single_informative_binary_is_learned(self):
        rng = np.random.default_rng(2)
        X = rng.integers(0, 2, size=(300, 1)).astype(float)
        y = X[:, 0]
        est = MonotoneBoostedTrees(n_rounds=30, learning_rate=0.5, max_depth=2).fit(X, y)
        assert (est.predict(X) == y).all()
        m1 = est.decision_function(np.array([[1.0]]))[0]
        m0 = est.decision_function(np.array([[0.0]]))[0]
        assert m1 > 2.0 > 0.0 > m0

    def test_zero_rounds_gives_prior_margin(self):
        X = np.array([[0.0], [1.0], [0.0], [1.0]])
        y = np.array([0.0, 0.0, 0.0, 1.0])
        est = MonotoneBoostedTrees(n_rounds=0).fit(X, y)
        expected = np.log(0.25 / 0.75)
        np.testing.assert_allclose(est.decision_function(X), expected)
        assert est.trees_ == []

    def test_predict_proba_columns(self):
        rng = np.random.default_rng(3)
        X, y = make_xor_free_data(rng)
        est = MonotoneBoostedTrees(n_rounds=10).fit(X, y)
        proba = est.predict_proba(X[:20])
        np.testing.assert_allclose(proba.sum(axis=1), 1.0)
        np.testing.assert_allclose(proba[:, 1], sigmoid(est.decision_function(X[:20])))

    def test_margin_threshold_is_prediction(self):
        rng = np.random.default_rng(4)
        X, y = make_xor_free_data(rng)
        est = MonotoneBoostedTrees(n_rounds=15).fit(X, y)
        margins = est.decision_function(X)
        assert np.array_equal(est.predict(X), (margins >= 0).astype(int))

    def test_feature_count_checked_at_predict(self):
        rng = np.random.default_rng(5)
        X, y = make_xor_free_data(rng)
        est = MonotoneBoostedTrees(n_rounds=2).fit(X, y)
        with pytest.raises(ValueError, match="features"):
            est.decision_function(X[:, :2])

    def test_deterministic_across_fits_and_seeds(self):
        rng = np.random.default_rng(6)
        X, y = make_xor_free_data(rng)
        a = MonotoneBoostedTrees(n_rounds=8, seed=0).fit(X, y)
        b = MonotoneBoostedTrees(n_rounds=8, seed=99).fit(X, y)
        assert a.base_margin_ == b.base_margin_
        assert [t.to_dict() for t in a.trees_] == [t.to_dict() for t in b.trees_]

    def test_cover_bookkeeping(self):
        rng = np.random.default_rng(7)
        X, y = make_xor_free_data(rng, n=250)
        est = MonotoneBoostedTrees(n_rounds=5, max_depth=3).fit(X, y)

        def check(node):
            if node.is_leaf:
                return
            assert node.left.cover + node.right.cover == node.cover
            check(node.left)
            check(node.right)

        for tree in est.trees_:
            assert tree.cover == 250
            check(tree)
            assert max_depth(tree) <= 3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_rounds": -1},
            {"learning_rate": 0.0},
            {"max_depth": 0},
            {"min_child_weight": 0.0},
            {"l2_lambda": -0.5},
            {"n_bins": 1},
            {"monotone": [1]},
            {"monotone": [2, 0, 0]},
        ],
    )
    def test_bad_params_rejected(self, kwargs):
        rng = np.random.default_rng(8)
        X, y = make_xor_free_data(rng, n=50)
        with pytest.raises(ValueError):
            MonotoneBoostedTrees(**kwargs).fit(X, y)

    def test_non_binary_labels_rejected(self):
        X = np.zeros((4, 1))
        with pytest.raises(ValueError, match="binary"):
            MonotoneBoostedTrees().fit(X, [1, 2, 1, 2])

    def test_single_class_labels_rejected(self):
        with pytest.raises(ValueError, match="single-class"):
            MonotoneBoostedTrees().fit(np.zeros((4, 1)), [1, 1, 1, 1])


class TestMonotoneConstraint:
    def test_anticorrelated_feature_cannot_push_margin_down(self):
        rng = np.random.default_rng(9)
        n = 500
        X = np.column_stack(
            [rng.integers(0, 2, size=n).astype(float), rng.normal(size=n)]
        )
        y = 1.0 - X[:, 0]  # perfectly anti-correlated with the constrained feature
        est = MonotoneBoostedTrees(n_rounds=20, monotone=[1, 0]).fit(X, y)
        grid = rng.normal(size=(50, 1))
        lo = est.decision_function(np.column_stack([np.zeros(50), grid[:, 0]]))
        hi = est.decision_function(np.column_stack([np.ones(50), grid[:, 0]]))
        assert (hi >= lo - 1e-12).all()

    def test_unconstrained_fit_does_use_the_signal(self):
        rng = np.random.default_rng(10)
        n = 500
        X = rng.integers(0, 2, size=(n, 1)).astype(float)
        y = 1.0 - X[:, 0]
        est = MonotoneBoostedTrees(n_rounds=20).fit(X, y)
        m1 = est.decision_function(np.array([[1.0]]))[0]
        m0 = est.decision_function(np.array([[0.0]]))[0]
        assert m1 < m0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_margins_nondecreasing_in_constrained_features(self, seed):
        rng = np.random.default_rng(seed)
        n, d = 300, 4
        X = np.column_stack(
            [
                rng.integers(0, 2, size=(n, 2)).astype(float),
                rng.normal(size=(n, 2)),
            ]
        )
        beta = rng.normal(size=d)
        y = (rng.random(n) < sigmoid(X @ beta)).astype(float)
        if y.min() == y.max():
            return
        est = MonotoneBoostedTrees(
            n_rounds=10, max_depth=3, monotone=[1, 1, 1, 0]
        ).fit(X, y)
        base = rng.normal(size=(30, d))
        base[:, :2] = rng.integers(0, 2, size=(30, 2))
        bumped = base.copy()
        bumped[:, :2] = np.maximum(bumped[:, :2], rng.integers(0, 2, size=(30, 2)))
        bumped[:, 2] += rng.exponential(size=30)
        diff = est.decision_function(bumped) - est.decision_function(base)
        assert (diff >= -1e-12).all()


class TestFromParts:
    def test_round_trip_preserves_outputs(self):
        rng = np.random.default_rng(11)
        ens = random_ensemble(rng, n_features=5)
        rebuilt = MonotoneBoostedTrees.from_parts(
            ens.base_margin_,
            [TreeNode.from_dict(t.to_dict(), 5) for t in ens.trees_],
            n_features=5,
        )
        X = rng.random((40, 5))
        assert np.array_equal(ens.decision_function(X), rebuilt.decision_function(X))
