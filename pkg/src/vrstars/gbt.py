"""Gradient boosted trees for binary targets, with optional monotone constraints.

Each round fits one depth-limited tree to the Newton step of the logistic
loss: gradients ``g = p - y`` and hessians ``h = p (1 - p)`` are accumulated
into per-feature histograms, split gain follows the regularized second-order
formula, and leaf values take the damped Newton step ``-lr * G / (H + lambda)``.

Features marked monotone (+1) are enforced by bound propagation: every node
carries an allowed value interval, a split on a constrained feature is only
admissible when the left child's Newton value does not exceed the right
child's, children tighten their intervals to the midpoint of those two values,
and leaf values clamp into their interval. The ensemble margin is then
provably nondecreasing in every constrained feature.

Training is sequential and fully deterministic: identical data and parameters
give identical trees regardless of the host's thread count.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .trees import TreeNode, tree_values


def sigmoid(margin):
    """Numerically stable logistic function; exact 0.0/1.0 at extreme margins."""
    m = np.asarray(margin, dtype=np.float64)
    scalar = m.ndim == 0
    m = np.atleast_1d(m)
    out = np.empty_like(m)
    pos = m >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-m[pos]))
    em = np.exp(m[~pos])
    out[~pos] = em / (1.0 + em)
    return float(out[0]) if scalar else out


def _candidate_thresholds(col: np.ndarray, n_bins: int) -> np.ndarray:
    """Split candidates for one column: midpoints between adjacent values.

    Columns with up to ``n_bins`` distinct values keep every midpoint (a 0/1
    column therefore gets exactly 0.5); denser columns snap quantile cuts to
    the midpoint of the two surrounding distinct values.
    """
    u = np.unique(col)
    if u.size <= 1:
        return np.empty(0, dtype=np.float64)
    if u.size <= n_bins:
        return (u[:-1] + u[1:]) / 2.0
    qs = np.quantile(col, np.arange(1, n_bins) / n_bins)
    idx = np.searchsorted(u, qs, side="right")
    idx = idx[(idx >= 1) & (idx < u.size)]
    return np.unique((u[idx - 1] + u[idx]) / 2.0)


class MonotoneBoostedTrees(BaseEstimator, ClassifierMixin):
    """Newton-boosted tree ensemble for a binary target.

    Parameters
    ----------
    n_rounds : int
        Number of boosting rounds (trees). Zero is legal and yields the
        prior-only model.
    learning_rate : float
        Shrinkage applied to every leaf value.
    max_depth : int
        Maximum tree depth (root at depth 0).
    min_child_weight : float
        Minimum hessian mass required on each side of a split.
    l2_lambda : float
        L2 regularization added to hessian sums.
    n_bins : int
        Upper bound on histogram bins per feature; numeric columns are
        quantile-binned once before boosting.
    seed : int
        Accepted for interface parity; training itself is deterministic.
    monotone : sequence of int or None
        Per-feature flags, 1 for a nondecreasing constraint, 0 for none.
    """

    def __init__(
        self,
        n_rounds: int = 100,
        learning_rate: float = 0.1,
        max_depth: int = 4,
        min_child_weight: float = 1.0,
        l2_lambda: float = 1.0,
        n_bins: int = 256,
        seed: int = 0,
        monotone=None,
    ):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_child_weight = min_child_weight
        self.l2_lambda = l2_lambda
        self.n_bins = n_bins
        self.seed = seed
        self.monotone = monotone

    def _validate_params_(self, n_features: int) -> np.ndarray:
        if self.n_rounds < 0:
            raise ValueError("n_rounds must be >= 0")
        if self.learning_rate <= 0 or self.min_child_weight <= 0:
            raise ValueError("learning_rate and min_child_weight must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be >= 0")
        if self.n_bins < 2:
            raise ValueError("n_bins must be >= 2")
        if self.monotone is None:
            return np.zeros(n_features, dtype=np.int64)
        mono = np.asarray(self.monotone, dtype=np.int64)
        if mono.shape != (n_features,) or not np.isin(mono, (0, 1)).all():
            raise ValueError("monotone must give a 0/1 flag per feature")
        return mono

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        values = np.unique(y)
        if not np.isin(values, (0.0, 1.0)).all():
            raise ValueError("labels must be binary 0/1")
        if values.size < 2:
            raise ValueError("training labels are single-class")
        mono = self._validate_params_(X.shape[1])
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])

        thresholds = [_candidate_thresholds(X[:, f], self.n_bins) for f in range(X.shape[1])]
        n_bins_per = np.array([t.size + 1 for t in thresholds], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(n_bins_per)[:-1]]).astype(np.int64)
        total_bins = int(n_bins_per.sum())
        codes = np.empty(X.shape, dtype=np.int64)
        for f in range(X.shape[1]):
            codes[:, f] = np.searchsorted(thresholds[f], X[:, f], side="right")

        p_bar = y.mean()
        self.base_margin_ = float(math.log(p_bar / (1.0 - p_bar)))
        margins = np.full(X.shape[0], self.base_margin_)
        self.trees_ = []
        for _ in range(self.n_rounds):
            p = sigmoid(margins)
            g = p - y
            h = p * (1.0 - p)
            tree, updates = self._grow(codes, g, h, thresholds, offsets, total_bins, mono)
            for rows, value in updates:
                margins[rows] += value
            self.trees_.append(tree)
        return self

    def _grow(self, codes, g, h, thresholds, offsets, total_bins, mono):
        lr = self.learning_rate
        lam = self.l2_lambda
        mcw = self.min_child_weight
        n_features = codes.shape[1]
        updates: list[tuple[np.ndarray, float]] = []

        def build(rows: np.ndarray, depth: int, lo: float, hi: float) -> TreeNode:
            G = float(g[rows].sum())
            H = float(h[rows].sum())
            value = min(max(-lr * G / (H + lam), lo), hi)
            if depth >= self.max_depth or rows.size < 2:
                updates.append((rows, value))
                return TreeNode(cover=float(rows.size), value=value)

            sub = codes[rows]
            flat = (sub + offsets[None, :]).ravel()
            hist_g = np.bincount(flat, weights=np.repeat(g[rows], n_features), minlength=total_bins)
            hist_h = np.bincount(flat, weights=np.repeat(h[rows], n_features), minlength=total_bins)
            hist_c = np.bincount(flat, minlength=total_bins)

            best_gain = 0.0
            best: tuple[int, int, float | None] | None = None
            parent_score = G * G / (H + lam)
            for f in range(n_features):
                nb = thresholds[f].size + 1
                if nb < 2:
                    continue
                lo_bin = offsets[f]
                GL = np.cumsum(hist_g[lo_bin : lo_bin + nb])[:-1]
                HL = np.cumsum(hist_h[lo_bin : lo_bin + nb])[:-1]
                CL = np.cumsum(hist_c[lo_bin : lo_bin + nb])[:-1]
                GR = G - GL
                HR = H - HL
                CR = rows.size - CL
                valid = (HL >= mcw) & (HR >= mcw) & (CL > 0) & (CR > 0)
                if not valid.any():
                    continue
                mid = None
                if mono[f]:
                    wl = np.clip(-lr * GL / (HL + lam), lo, hi)
                    wr = np.clip(-lr * GR / (HR + lam), lo, hi)
                    valid &= wl <= wr
                gain = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent_score)
                gain = np.where(valid, gain, -np.inf)
                b = int(np.argmax(gain))
                if gain[b] > best_gain:
                    if mono[f]:
                        mid = 0.5 * (wl[b] + wr[b])
                    best_gain = float(gain[b])
                    best = (f, b, mid)

            if best is None:
                updates.append((rows, value))
                return TreeNode(cover=float(rows.size), value=value)

            f, b, mid = best
            go_left = sub[:, f] <= b
            rows_left = rows[go_left]
            rows_right = rows[~go_left]
            if mid is None:
                left = build(rows_left, depth + 1, lo, hi)
                right = build(rows_right, depth + 1, lo, hi)
            else:
                left = build(rows_left, depth + 1, lo, mid)
                right = build(rows_right, depth + 1, mid, hi)
            return TreeNode(
                cover=float(rows.size),
                feature=f,
                threshold=float(thresholds[f][b]),
                left=left,
                right=right,
            )

        root = build(np.arange(codes.shape[0]), 0, -np.inf, np.inf)
        return root, updates

    def decision_function(self, X) -> np.ndarray:
        """Ensemble margin (log-odds): base margin plus all tree values."""
        check_is_fitted(self, "trees_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        margin = np.full(X.shape[0], self.base_margin_)
        for tree in self.trees_:
            margin += tree_values(tree, X)
        return margin

    def predict_proba(self, X) -> np.ndarray:
        p = sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    @classmethod
    def from_parts(cls, base_margin: float, trees: list[TreeNode], n_features: int, monotone=None) -> "MonotoneBoostedTrees":
        """Assemble a fitted ensemble from explicit parts (deserialization, tests)."""
        est = cls(monotone=monotone)
        est.base_margin_ = float(base_margin)
        est.trees_ = list(trees)
        est.n_features_in_ = n_features
        est.classes_ = np.array([0, 1])
        return est
