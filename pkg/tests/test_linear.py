"""Logistic baseline: separable fits, degenerate settings, determinism."""
import numpy as np
import pytest

from vrstars import LogisticScorer, sigmoid


def separable_data(rng, n=300):
    X = rng.normal(size=(n, 3))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(float)
    return X, y


class TestFitting:
    def test_separable_problem_nearly_solved(self):
        rng = np.random.default_rng(0)
        X, y = separable_data(rng)
        est = LogisticScorer().fit(X, y)
        assert (est.predict(X) == y).mean() >= 0.99

    def test_zero_epochs_gives_coin_flip_probabilities(self):
        X = np.random.default_rng(1).normal(size=(20, 2))
        y = np.array([0.0, 1.0] * 10)
        est = LogisticScorer(epochs=0).fit(X, y)
        np.testing.assert_array_equal(est.decision_function(X), 0.0)
        np.testing.assert_array_equal(est.predict_proba(X)[:, 1], 0.5)

    def test_deterministic_across_fits_and_seeds(self):
        rng = np.random.default_rng(2)
        X, y = separable_data(rng)
        a = LogisticScorer(seed=0).fit(X, y)
        b = LogisticScorer(seed=123).fit(X, y)
        assert np.array_equal(a.coef_, b.coef_)
        assert a.intercept_ == b.intercept_

    def test_duplicating_rows_changes_nothing(self):
        rng = np.random.default_rng(3)
        X, y = separable_data(rng, n=100)
        a = LogisticScorer(epochs=50).fit(X, y)
        b = LogisticScorer(epochs=50).fit(np.vstack([X, X]), np.concatenate([y, y]))
        np.testing.assert_allclose(a.coef_, b.coef_, atol=1e-12)
        assert a.intercept_ == pytest.approx(b.intercept_, abs=1e-12)

    def test_standardization_absorbs_feature_shift(self):
        rng = np.random.default_rng(4)
        X, y = separable_data(rng, n=200)
        shifted = X + np.array([100.0, -5.0, 0.0])
        a = LogisticScorer(epochs=100).fit(X, y)
        b = LogisticScorer(epochs=100).fit(shifted, y)
        np.testing.assert_allclose(
            a.decision_function(X), b.decision_function(shifted), atol=1e-9
        )

    def test_constant_column_is_harmless(self):
        rng = np.random.default_rng(5)
        X, y = separable_data(rng, n=100)
        X[:, 2] = 7.0
        est = LogisticScorer(epochs=50).fit(X, y)
        assert np.isfinite(est.decision_function(X)).all()
        assert est.coef_[2] == 0.0

    def test_proba_matches_margin(self):
        rng = np.random.default_rng(6)
        X, y = separable_data(rng, n=100)
        est = LogisticScorer(epochs=30).fit(X, y)
        np.testing.assert_allclose(
            est.predict_proba(X)[:, 1], sigmoid(est.decision_function(X))
        )
        np.testing.assert_allclose(est.predict_proba(X).sum(axis=1), 1.0)

    @pytest.mark.parametrize(
        "kwargs", [{"l2": -1.0}, {"epochs": -1}, {"lr": 0.0}]
    )
    def test_bad_params_rejected(self, kwargs):
        X = np.zeros((4, 1))
        with pytest.raises(ValueError):
            LogisticScorer(**kwargs).fit(X, [0, 1, 0, 1])

    def test_non_binary_labels_rejected(self):
        with pytest.raises(ValueError, match="binary"):
            LogisticScorer().fit(np.zeros((3, 1)), [1, 2, 3])

    def test_feature_count_checked_at_predict(self):
        rng = np.random.default_rng(7)
        X, y = separable_data(rng, n=50)
        est = LogisticScorer(epochs=5).fit(X, y)
        with pytest.raises(ValueError, match="features"):
            est.decision_function(X[:, :2])


class TestFromParts:
    def test_rebuild_matches_fitted(self):
        rng = np.random.default_rng(8)
        X, y = separable_data(rng, n=80)
        est = LogisticScorer(epochs=40).fit(X, y)
        rebuilt = LogisticScorer.from_parts(
            est.intercept_, est.coef_, est.mean_, est.scale_
        )
        assert np.array_equal(est.decision_function(X), rebuilt.decision_function(X))
