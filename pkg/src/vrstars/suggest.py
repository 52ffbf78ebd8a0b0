"""Actionable improvement suggestions for a rated property.

A suggestion is a suggestible amenity the property does not list whose
addition would raise the probability of clearing the next rating bar. The
probability in question comes from the classifier responsible for the rating
one step up (for a top-rated property, the last classifier: the one keeping
it on top). Because suggestible features are monotone, an increment can never
be negative; zero-impact flips are filtered out rather than shown.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gbt import sigmoid
from .ordinal import RatingModel, responsible_classifier
from .schema import N_CLASSES, validate_rating


class SuggestError(ValueError):
    """Raised for flips that are not legal suggestions."""


@dataclass(frozen=True)
class Suggestion:
    feature: str
    increment: float


def suggestion_target(rating: int) -> int:
    """Classifier whose probability a suggestion should move.

    For ratings below 5 this is the classifier responsible for the next
    rating up; for a 5 it is the classifier responsible for staying a 5.
    """
    rating = validate_rating(rating)
    if rating < N_CLASSES:
        return responsible_classifier(rating + 1)
    return responsible_classifier(N_CLASSES)


def compute_suggestions(model: RatingModel, x, rating: int | None = None) -> list[Suggestion]:
    """Positive-impact amenity additions, strongest first.

    Ties in impact order by feature id. Only suggestible features currently
    at 0 are considered.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (len(model.schema),):
        raise SuggestError(f"expected a vector of {len(model.schema)} features")
    if rating is None:
        rating = int(model.rate(x[None, :])[0])
    k = suggestion_target(rating)
    scorer = model.scorer(k)
    candidates = [fid for fid in model.schema.suggestible_ids() if x[fid] == 0.0]
    if not candidates:
        return []
    flipped = np.tile(x, (len(candidates), 1))
    for row, fid in enumerate(candidates):
        flipped[row, fid] = 1.0
    p_now = float(sigmoid(scorer.decision_function(x[None, :])[0]))
    p_flipped = sigmoid(scorer.decision_function(flipped))
    gains = [
        (float(p_flipped[row] - p_now), fid)
        for row, fid in enumerate(candidates)
        if p_flipped[row] - p_now > 0.0
    ]
    gains.sort(key=lambda t: (-t[0], t[1]))
    return [Suggestion(model.schema[fid].name, w) for w, fid in gains]


def apply_suggestion(model: RatingModel, x, feature: str) -> np.ndarray:
    """Return a copy of ``x`` with a suggestible absent feature set to 1."""
    x = np.asarray(x, dtype=np.float64)
    fid = model.schema.index(feature)
    if not model.schema[fid].suggestible:
        raise SuggestError(f"feature {feature!r} is not suggestible")
    if x[fid] != 0.0:
        raise SuggestError(f"feature {feature!r} is already present")
    out = x.copy()
    out[fid] = 1.0
    return out
