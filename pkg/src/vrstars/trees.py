"""Binary decision tree nodes: routing, serialization, and validation.

Routing sends a sample left when its feature value is strictly below the
threshold. Every node stores its cover (the number of training rows that
reached it), which later serves as the conditioning weight when attributions
marginalize over absent features.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TreeFormatError(ValueError):
    """Raised when a serialized tree violates the format's invariants."""


@dataclass
class TreeNode:
    cover: float
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.value is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value, "cover": self.cover}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "cover": self.cover,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict, n_features: int) -> "TreeNode":
        if not isinstance(obj, dict):
            raise TreeFormatError("tree node must be an object")
        cover = obj.get("cover")
        if not isinstance(cover, (int, float)) or isinstance(cover, bool) or cover <= 0:
            raise TreeFormatError(f"node cover must be a positive number, got {cover!r}")
        if "value" in obj:
            if set(obj) != {"value", "cover"}:
                raise TreeFormatError(f"leaf node has unexpected keys: {sorted(obj)}")
            if not isinstance(obj["value"], (int, float)) or isinstance(obj["value"], bool):
                raise TreeFormatError("leaf value must be a number")
            return cls(cover=float(cover), value=float(obj["value"]))
        if set(obj) != {"feature", "threshold", "cover", "left", "right"}:
            raise TreeFormatError(f"split node has unexpected keys: {sorted(obj)}")
        feature = obj["feature"]
        if not isinstance(feature, int) or isinstance(feature, bool):
            raise TreeFormatError("split feature must be an integer id")
        if not 0 <= feature < n_features:
            raise TreeFormatError(
                f"split feature {feature} outside schema of {n_features} features"
            )
        threshold = obj["threshold"]
        if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
            raise TreeFormatError("split threshold must be a number")
        left = cls.from_dict(obj["left"], n_features)
        right = cls.from_dict(obj["right"], n_features)
        node = cls(
            cover=float(cover),
            feature=feature,
            threshold=float(threshold),
            left=left,
            right=right,
        )
        if left.cover + right.cover != node.cover:
            raise TreeFormatError(
                f"cover mismatch: {node.cover} != {left.cover} + {right.cover}"
            )
        return node


def route_one(node: TreeNode, x: np.ndarray) -> float:
    """Leaf value reached by a single sample."""
    while not node.is_leaf:
        node = node.left if x[node.feature] < node.threshold else node.right
    return node.value


def tree_values(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """Leaf values reached by every row of ``X``."""
    out = np.empty(X.shape[0], dtype=np.float64)
    _fill_values(node, X, np.arange(X.shape[0]), out)
    return out


def _fill_values(node: TreeNode, X: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
    if node.is_leaf:
        out[rows] = node.value
        return
    go_left = X[rows, node.feature] < node.threshold
    _fill_values(node.left, X, rows[go_left], out)
    _fill_values(node.right, X, rows[~go_left], out)


def expected_value(node: TreeNode) -> float:
    """Cover-weighted mean leaf value: the tree's output on an average row."""
    if node.is_leaf:
        return node.value
    wl = node.left.cover / node.cover
    return wl * expected_value(node.left) + (1.0 - wl) * expected_value(node.right)


def used_features(node: TreeNode) -> set[int]:
    if node.is_leaf:
        return set()
    return {node.feature} | used_features(node.left) | used_features(node.right)


def max_depth(node: TreeNode) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(max_depth(node.left), max_depth(node.right))
