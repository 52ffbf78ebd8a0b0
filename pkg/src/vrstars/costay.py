"""Label transfer from star-rated hotels to vacation rentals via shared guests.

A vacation rental and a hotel are linked when at least one guest stayed in
both. The edge weight is the total number of hotel stays made by guests who
stayed in the rental at least once; a guest's repeat visits to the rental do
not multiply their hotel stays. Summing edge weights by the linked hotels'
star classes gives a 5-bin distribution per rental, and its mode (ties going
to the lower class) becomes the rental's label when enough total weight backs
it up.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .data import KIND_HOTEL, KIND_VR, Dataset, StayTable
from .schema import N_CLASSES

DEFAULT_MIN_SUPPORT = 3


class LabelingError(ValueError):
    """Raised for stay tables or datasets the transfer cannot run on."""


@dataclass(frozen=True)
class StayGraph:
    """Bipartite rental-hotel co-stay graph with integer edge weights."""

    edges: dict[tuple[str, str], int]
    by_rental: dict[str, dict[str, int]]

    def weight(self, vr_id: str, hotel_id: str) -> int:
        return self.edges.get((vr_id, hotel_id), 0)


def build_stay_graph(stays: StayTable, ds: Dataset) -> StayGraph:
    """Aggregate stays into the co-stay graph.

    Every stay must reference a property in ``ds``, and every hotel in ``ds``
    must carry official stars (they are the label source).
    """
    kinds = {r.property_id: r.kind for r in ds.records}
    for rec in ds.records:
        if rec.kind == KIND_HOTEL and rec.official_stars is None:
            raise LabelingError(f"hotel without stars: {rec.property_id}")

    per_guest: dict[str, Counter] = defaultdict(Counter)
    for guest, prop in stays:
        if prop not in kinds:
            raise LabelingError(f"stay references unknown property: {prop}")
        per_guest[guest][prop] += 1

    edges: dict[tuple[str, str], int] = {}
    by_rental: dict[str, dict[str, int]] = defaultdict(dict)
    for counts in per_guest.values():
        rentals = [p for p in counts if kinds[p] == KIND_VR]
        if not rentals:
            continue
        hotel_counts = [(p, c) for p, c in counts.items() if kinds[p] == KIND_HOTEL]
        for vr in rentals:
            for hotel, c in hotel_counts:
                key = (vr, hotel)
                edges[key] = edges.get(key, 0) + c
                by_rental[vr][hotel] = by_rental[vr].get(hotel, 0) + c
    return StayGraph(edges=edges, by_rental=dict(by_rental))


def star_distribution(graph: StayGraph, vr_id: str, ds: Dataset) -> np.ndarray | None:
    """Edge weight per star class (length 5), or ``None`` for an isolated rental."""
    neighbors = graph.by_rental.get(vr_id)
    if not neighbors:
        return None
    stars = {r.property_id: r.official_stars for r in ds.records if r.kind == KIND_HOTEL}
    weights = np.zeros(N_CLASSES, dtype=np.int64)
    for hotel, w in neighbors.items():
        weights[stars[hotel] - 1] += w
    return weights


def mode_label(distribution: np.ndarray, min_support: float = DEFAULT_MIN_SUPPORT) -> int | None:
    """Mode of a star distribution, or ``None`` below the support floor.

    Support is the total edge weight behind the distribution. Ties resolve to
    the lower class: an uncertain rental should not be flattered.
    """
    weights = np.asarray(distribution)
    if weights.shape != (N_CLASSES,) or np.any(weights < 0):
        raise LabelingError("distribution must be 5 nonnegative weights")
    if weights.sum() < min_support:
        return None
    return int(np.argmax(weights)) + 1


def propagate_labels(
    ds: Dataset, stays: StayTable, min_support: float = DEFAULT_MIN_SUPPORT
) -> tuple[Dataset, float]:
    """Label the vacation rentals of ``ds`` from their co-stay distributions.

    Returns a rentals-only dataset restricted to those that cleared
    ``min_support``, plus the coverage fraction (labeled rentals over all
    rentals in ``ds``).
    """
    graph = build_stay_graph(stays, ds)
    vr_indices = [i for i, r in enumerate(ds.records) if r.kind == KIND_VR]
    kept: list[int] = []
    labels: list[int] = []
    for i in vr_indices:
        dist = star_distribution(graph, ds.records[i].property_id, ds)
        if dist is None:
            continue
        label = mode_label(dist, min_support)
        if label is None:
            continue
        kept.append(i)
        labels.append(label)
    labeled = ds.subset(kept).with_labels(np.asarray(labels, dtype=np.int64))
    coverage = len(kept) / len(vr_indices) if vr_indices else 0.0
    return labeled, coverage


def label_rows(
    ds: Dataset, stays: StayTable, min_support: float = DEFAULT_MIN_SUPPORT
) -> list[tuple[str, int, float]]:
    """(id, label, support) rows for every labelable rental, in dataset order."""
    graph = build_stay_graph(stays, ds)
    rows: list[tuple[str, int, float]] = []
    for rec in ds.records:
        if rec.kind != KIND_VR:
            continue
        dist = star_distribution(graph, rec.property_id, ds)
        if dist is None:
            continue
        label = mode_label(dist, min_support)
        if label is None:
            continue
        rows.append((rec.property_id, label, float(dist.sum())))
    return rows
