"""Shapley-value attributions for rating decisions.

The fast path is the polynomial-time tree algorithm: it walks each tree once,
carrying the set of features seen on the path together with the permutation
weights of including/excluding each one, and so computes exact Shapley values
for the tree's conditional-expectation game (absent features marginalized by
cover proportions). Local accuracy holds by construction: the base value plus
all attributions equals the model's margin for the sample.

``brute_force_shap`` evaluates the defining Shapley sum directly by
enumerating feature subsets. Features a tree never splits on have identical
conditional expectations with or without them, so their terms vanish and the
enumeration may restrict to the features the tree actually uses; this yields
the same sum while keeping the oracle exponential only in the tree depth. It
is deliberately implemented with none of the path machinery so the two can
check each other.

Attributions live in margin (log-odds) space of the responsible classifier.
Linear scorers get their exact additive decomposition instead (standardized
coefficient times standardized value), flagged by ``method``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gbt import MonotoneBoostedTrees, sigmoid
from .linear import LogisticScorer
from .ordinal import RatingModel, responsible_classifier
from .trees import TreeNode, expected_value, used_features

MAX_BRUTE_FORCE_FEATURES = 15


class ShapError(ValueError):
    """Raised for trees or inputs the attribution algorithms cannot handle."""


class _PathElement:
    __slots__ = ("feature", "zero_fraction", "one_fraction", "pweight")

    def __init__(self, feature: int, zero_fraction: float, one_fraction: float, pweight: float):
        self.feature = feature
        self.zero_fraction = zero_fraction
        self.one_fraction = one_fraction
        self.pweight = pweight

    def copy(self) -> "_PathElement":
        return _PathElement(self.feature, self.zero_fraction, self.one_fraction, self.pweight)


def _extend(path: list[_PathElement], zero_fraction: float, one_fraction: float, feature: int) -> None:
    path.append(_PathElement(feature, zero_fraction, one_fraction, 1.0 if not path else 0.0))
    d = len(path) - 1
    for i in range(d - 1, -1, -1):
        path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) / (d + 1)
        path[i].pweight = zero_fraction * path[i].pweight * (d - i) / (d + 1)


def _unwind(path: list[_PathElement], index: int) -> None:
    d = len(path) - 1
    one = path[index].one_fraction
    zero = path[index].zero_fraction
    carry = path[d].pweight
    for j in range(d - 1, -1, -1):
        if one != 0.0:
            tmp = path[j].pweight
            path[j].pweight = carry * (d + 1) / ((j + 1) * one)
            carry = tmp - path[j].pweight * zero * (d - j) / (d + 1)
        else:
            path[j].pweight = path[j].pweight * (d + 1) / (zero * (d - j))
    for j in range(index, d):
        path[j].feature = path[j + 1].feature
        path[j].zero_fraction = path[j + 1].zero_fraction
        path[j].one_fraction = path[j + 1].one_fraction
    path.pop()


def _unwound_sum(path: list[_PathElement], index: int) -> float:
    d = len(path) - 1
    one = path[index].one_fraction
    zero = path[index].zero_fraction
    total = 0.0
    if one != 0.0:
        carry = path[d].pweight
        for j in range(d - 1, -1, -1):
            tmp = carry / ((j + 1) * one)
            total += tmp
            carry = path[j].pweight - tmp * zero * (d - j)
    else:
        for j in range(d - 1, -1, -1):
            total += path[j].pweight / (zero * (d - j))
    return total * (d + 1)


def _check_covers(node: TreeNode) -> None:
    if node.cover <= 0:
        raise ShapError("tree contains a node with nonpositive cover")
    if not node.is_leaf:
        _check_covers(node.left)
        _check_covers(node.right)


def _tree_recurse(
    node: TreeNode,
    path: list[_PathElement],
    zero_fraction: float,
    one_fraction: float,
    feature: int,
    x: np.ndarray,
    phi: np.ndarray,
) -> None:
    path = [el.copy() for el in path]
    _extend(path, zero_fraction, one_fraction, feature)
    if node.is_leaf:
        for i in range(1, len(path)):
            w = _unwound_sum(path, i)
            el = path[i]
            phi[el.feature] += w * (el.one_fraction - el.zero_fraction) * node.value
        return
    hot, cold = (
        (node.left, node.right)
        if x[node.feature] < node.threshold
        else (node.right, node.left)
    )
    hot_zero = hot.cover / node.cover
    cold_zero = cold.cover / node.cover
    incoming_zero = 1.0
    incoming_one = 1.0
    seen = next((i for i in range(1, len(path)) if path[i].feature == node.feature), 0)
    if seen:
        incoming_zero = path[seen].zero_fraction
        incoming_one = path[seen].one_fraction
        _unwind(path, seen)
    _tree_recurse(hot, path, hot_zero * incoming_zero, incoming_one, node.feature, x, phi)
    _tree_recurse(cold, path, cold_zero * incoming_zero, 0.0, node.feature, x, phi)


def tree_shap(clf: MonotoneBoostedTrees, x) -> tuple[float, np.ndarray]:
    """Exact per-feature attributions for one sample, plus the base value.

    The base value is the ensemble's cover-weighted expected margin; it plus
    the attributions reproduces ``clf.decision_function`` at ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (clf.n_features_in_,):
        raise ShapError(f"expected a vector of {clf.n_features_in_} features")
    phi = np.zeros(clf.n_features_in_)
    base = clf.base_margin_
    for tree in clf.trees_:
        _check_covers(tree)
        base += expected_value(tree)
        _tree_recurse(tree, [], 1.0, 1.0, -1, x, phi)
    return base, phi


def _subset_expectations(node: TreeNode, x: np.ndarray, bit_of: dict[int, int], n_subsets: int) -> np.ndarray:
    """E[f(x) | x_S] for every subset S of the tree's features, as a vector."""
    if node.is_leaf:
        return np.full(n_subsets, node.value)
    left = _subset_expectations(node.left, x, bit_of, n_subsets)
    right = _subset_expectations(node.right, x, bit_of, n_subsets)
    routed = left if x[node.feature] < node.threshold else right
    w_left = node.left.cover / node.cover
    marginal = w_left * left + (1.0 - w_left) * right
    in_subset = (np.arange(n_subsets) & (1 << bit_of[node.feature])) != 0
    return np.where(in_subset, routed, marginal)


def brute_force_shap(clf: MonotoneBoostedTrees, x) -> np.ndarray:
    """Shapley attributions by direct subset enumeration (small models only)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (clf.n_features_in_,):
        raise ShapError(f"expected a vector of {clf.n_features_in_} features")
    if clf.n_features_in_ > MAX_BRUTE_FORCE_FEATURES:
        raise ShapError(
            f"brute force is exponential; refusing more than "
            f"{MAX_BRUTE_FORCE_FEATURES} features"
        )
    phi = np.zeros(clf.n_features_in_)
    for tree in clf.trees_:
        _check_covers(tree)
        feats = sorted(used_features(tree))
        t = len(feats)
        if t == 0:
            continue
        bit_of = {f: i for i, f in enumerate(feats)}
        n_subsets = 1 << t
        E = _subset_expectations(tree, x, bit_of, n_subsets)
        masks = np.arange(n_subsets)
        popcount = np.zeros(n_subsets, dtype=np.int64)
        for m in range(1, n_subsets):
            popcount[m] = popcount[m >> 1] + (m & 1)
        fact = [math.factorial(i) for i in range(t + 1)]
        weight_by_size = np.array([fact[s] * fact[t - s - 1] / fact[t] for s in range(t)])
        for f in feats:
            bit = 1 << bit_of[f]
            without = masks[(masks & bit) == 0]
            w = weight_by_size[popcount[without]]
            phi[f] += float(np.sum(w * (E[without | bit] - E[without])))
    return phi


@dataclass
class Explanation:
    """Per-feature margin attributions behind one rating decision."""

    rating: int
    responsible: int
    base_value: float
    values: np.ndarray
    names: tuple[str, ...]
    probability: float
    method: str

    def ranked(self) -> list[tuple[str, float]]:
        """All features: positives by value, then negatives by magnitude,
        then zeros; ties broken by feature id."""
        pos = [(i, v) for i, v in enumerate(self.values) if v > 0]
        neg = [(i, v) for i, v in enumerate(self.values) if v < 0]
        zero = [(i, v) for i, v in enumerate(self.values) if v == 0]
        pos.sort(key=lambda t: (-t[1], t[0]))
        neg.sort(key=lambda t: (t[1], t[0]))
        return [(self.names[i], float(v)) for i, v in pos + neg + zero]

    def top_items(self, n_positive: int = 5, n_negative: int = 3) -> list[tuple[str, float]]:
        """Presentation cut: strongest positives and negatives, zeros elided."""
        pos = [(n, v) for n, v in self.ranked() if v > 0][:n_positive]
        neg = [(n, v) for n, v in self.ranked() if v < 0][:n_negative]
        return pos + neg


def compute_explanation(model: RatingModel, x, rating: int | None = None) -> Explanation:
    """Explain one sample's rating against its responsible classifier."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (len(model.schema),):
        raise ShapError(f"expected a vector of {len(model.schema)} features")
    if rating is None:
        rating = int(model.rate(x[None, :])[0])
    k = responsible_classifier(rating)
    scorer = model.scorer(k)
    if isinstance(scorer, LogisticScorer):
        values = scorer.coef_ * (x - scorer.mean_) / scorer.scale_
        base = float(scorer.intercept_)
        method = "linear"
    else:
        base, values = tree_shap(scorer, x)
        method = "treeshap"
    prob = float(sigmoid(scorer.decision_function(x[None, :])[0]))
    return Explanation(
        rating=rating,
        responsible=k,
        base_value=float(base),
        values=values,
        names=model.schema.names,
        probability=prob,
        method=method,
    )
