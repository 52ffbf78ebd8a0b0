"""Regularized logistic regression baseline with the same scoring contract
as the boosted ensemble: a real-valued margin and a positive-class probability.

Features are standardized with training statistics and the weights are fit by
full-batch gradient descent on the mean logistic loss plus an L2 penalty.
Yes, plainer solvers exist; this one is a handful of lines, has no stochastic
state, and makes "same data in, same model out" trivially true.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .gbt import sigmoid


class LogisticScorer(BaseEstimator, ClassifierMixin):
    """Linear log-odds scorer for a binary target.

    ``epochs=0`` is legal and leaves the weights at zero, so every margin is 0
    and every probability is 0.5. ``seed`` is accepted for interface parity;
    the fit is deterministic.
    """

    def __init__(self, l2: float = 1e-4, epochs: int = 500, lr: float = 0.2, seed: int = 0):
        self.l2 = l2
        self.epochs = epochs
        self.lr = lr
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if not np.isin(np.unique(y), (0.0, 1.0)).all():
            raise ValueError("labels must be binary 0/1")
        if self.l2 < 0 or self.epochs < 0 or self.lr <= 0:
            raise ValueError("l2 and epochs must be >= 0, lr must be positive")
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        self.scale_ = np.where(scale > 0, scale, 1.0)
        Xs = (X - self.mean_) / self.scale_

        n = X.shape[0]
        w = np.zeros(X.shape[1])
        b = 0.0
        for _ in range(self.epochs):
            p = sigmoid(Xs @ w + b)
            err = p - y
            w -= self.lr * (Xs.T @ err / n + self.l2 * w)
            b -= self.lr * float(err.mean())
        self.coef_ = w
        self.intercept_ = b
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) / self.scale_ @ self.coef_ + self.intercept_

    def predict_proba(self, X) -> np.ndarray:
        p = sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    @classmethod
    def from_parts(cls, intercept: float, coef, mean, scale) -> "LogisticScorer":
        """Assemble a fitted scorer from explicit parts (deserialization, tests)."""
        est = cls()
        est.coef_ = np.asarray(coef, dtype=np.float64)
        est.intercept_ = float(intercept)
        est.mean_ = np.asarray(mean, dtype=np.float64)
        est.scale_ = np.asarray(scale, dtype=np.float64)
        est.n_features_in_ = est.coef_.shape[0]
        est.classes_ = np.array([0, 1])
        return est
