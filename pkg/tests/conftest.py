"""Shared builders for the test suite."""
from __future__ import annotations

import numpy as np

from vrstars import (
    Dataset,
    FeatureSchema,
    FeatureSpec,
    MonotoneBoostedTrees,
    PropertyRecord,
    TreeNode,
)


def make_schema(n_binary: int = 4, n_numeric: int = 0, suggestible: bool = True) -> FeatureSchema:
    """Small schema: monotone suggestible binaries, then free numerics."""
    specs = []
    for i in range(n_binary):
        specs.append(
            FeatureSpec(
                id=i,
                name=f"amenity_{i}",
                kind="binary",
                monotone=1,
                suggestible=suggestible,
            )
        )
    for j in range(n_numeric):
        specs.append(
            FeatureSpec(
                id=n_binary + j,
                name=f"metric_{j}",
                kind="numeric",
                monotone=0,
                suggestible=False,
            )
        )
    return FeatureSchema(specs)


def ordered_dataset(rng: np.random.Generator, n: int = 150) -> Dataset:
    """Labeled rentals whose rating is the amenity count plus a size bonus."""
    schema = make_schema(n_binary=3, n_numeric=1)
    amen = rng.integers(0, 2, size=(n, 3)).astype(float)
    size = rng.uniform(20.0, 60.0, size=n)
    y = 1 + amen.sum(axis=1).astype(int) + (size > 40.0)
    records = [
        PropertyRecord(
            property_id=f"p{i}",
            kind="vacation_rental",
            official_stars=None,
            features=np.concatenate([amen[i], [size[i]]]),
        )
        for i in range(n)
    ]
    return Dataset(schema=schema, records=records, labels=y)


def random_tree(rng: np.random.Generator, n_features: int, max_depth: int, cover: int) -> TreeNode:
    """Random tree with exact cover bookkeeping (parent = left + right)."""
    if max_depth == 0 or cover < 2 or rng.random() < 0.25:
        return TreeNode(cover=float(cover), value=float(rng.normal()))
    left_cover = int(rng.integers(1, cover))
    return TreeNode(
        cover=float(cover),
        feature=int(rng.integers(n_features)),
        threshold=float(rng.random()),
        left=random_tree(rng, n_features, max_depth - 1, left_cover),
        right=random_tree(rng, n_features, max_depth - 1, cover - left_cover),
    )


def random_ensemble(
    rng: np.random.Generator,
    n_features: int,
    max_trees: int = 5,
    max_depth: int = 4,
) -> MonotoneBoostedTrees:
    n_trees = int(rng.integers(1, max_trees + 1))
    trees = [
        random_tree(rng, n_features, max_depth, cover=int(rng.integers(4, 50)))
        for _ in range(n_trees)
    ]
    base = float(rng.normal())
    return MonotoneBoostedTrees.from_parts(base, trees, n_features)
