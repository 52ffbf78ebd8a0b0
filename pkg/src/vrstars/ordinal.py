"""Ordinal 1-5 rating model built from four binary "is it better than k" scorers.

Classifier k (k = 1..4) estimates Pr(y > k). Inference walks k upward and
promotes the rating one step at a time while every classifier so far clears
its threshold, so the final rating is backed by a consistent prefix of
positive decisions: the rating is 1 plus the length of the maximal passing
prefix.

The four estimates are not equally trustworthy at every rating: for low
ratings the first classifier carries the signal, for high ratings the last
one that had to fire does. ``responsible_classifier`` encodes that choice and
downstream explanations and suggestions are computed against it.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .data import Dataset
from .gbt import MonotoneBoostedTrees, sigmoid
from .linear import LogisticScorer
from .metrics import mamae
from .schema import N_CLASSES, FeatureSchema, validate_rating
from .trees import TreeNode

N_CLASSIFIERS = N_CLASSES - 1

#: Margin magnitude whose logistic value is exactly 0.0 or 1.0 in float64;
#: used to express degenerate "always yes/no" classifiers as ordinary models.
CONSTANT_MARGIN = 1000.0

THRESHOLD_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))

MODEL_VERSION = 1

BASE_GBT = "gbt"
BASE_LOGISTIC = "logistic"


class ModelError(ValueError):
    """Raised for malformed model files or inconsistent model parts."""


def expand_labels(y, k: int) -> np.ndarray:
    """Binary target for classifier ``k``: 1 where the rating exceeds ``k``."""
    if not 1 <= k <= N_CLASSIFIERS:
        raise ValueError(f"classifier index must be in 1..{N_CLASSIFIERS}, got {k}")
    y = np.asarray(y, dtype=np.int64)
    for v in y:
        validate_rating(int(v))
    return (y > k).astype(np.int64)


def responsible_classifier(rating: int) -> int:
    """Index of the classifier that a rating's explanation should lean on.

    Ratings 1 and 2 hang on the first decision; any higher rating c hangs on
    classifier c - 1, the last one that had to fire to reach it.
    """
    rating = validate_rating(rating)
    return 1 if rating < 3 else rating - 1


def consistent_label(probs, thresholds):
    """Rating(s) from exceedance probabilities via the maximal passing prefix.

    ``probs`` is one vector of 4 probabilities or an (n, 4) matrix;
    ``thresholds`` the per-classifier acceptance thresholds. Equivalent to
    promoting step by step while every classifier so far passes.
    """
    P = np.asarray(probs, dtype=np.float64)
    t = np.asarray(thresholds, dtype=np.float64)
    single = P.ndim == 1
    P = np.atleast_2d(P)
    if P.shape[1] != N_CLASSIFIERS or t.shape != (N_CLASSIFIERS,):
        raise ValueError(f"expected {N_CLASSIFIERS} probabilities and thresholds")
    passing = P >= t[None, :]
    ratings = 1 + np.cumprod(passing, axis=1).sum(axis=1)
    return int(ratings[0]) if single else ratings.astype(np.int64)


def _constant_like(base, positive: bool, n_features: int):
    """A fitted scorer of the base's family that always answers yes or no."""
    margin = CONSTANT_MARGIN if positive else -CONSTANT_MARGIN
    if isinstance(base, LogisticScorer):
        return LogisticScorer.from_parts(
            margin, np.zeros(n_features), np.zeros(n_features), np.ones(n_features)
        )
    return MonotoneBoostedTrees.from_parts(margin, [], n_features)


class OrdinalRatingClassifier(BaseEstimator, ClassifierMixin):
    """Four cloned binary scorers plus thresholds, predicting ratings 1..5.

    ``base_estimator`` is the prototype cloned for each classifier; ``None``
    means a default :class:`MonotoneBoostedTrees`. An expansion with only one
    class (no rating above k, or none at or below) cannot train a scorer and
    is replaced by a constant one with a warning.
    """

    def __init__(self, base_estimator=None, thresholds=None):
        self.base_estimator = base_estimator
        self.thresholds = thresholds

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        for v in y:
            validate_rating(int(v))
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.arange(1, N_CLASSES + 1)
        self.thresholds_ = _check_thresholds(
            np.full(N_CLASSIFIERS, 0.5) if self.thresholds is None else self.thresholds
        )
        base = self.base_estimator if self.base_estimator is not None else MonotoneBoostedTrees()
        self.scorers_ = []
        for k in range(1, N_CLASSIFIERS + 1):
            yk = expand_labels(y, k)
            if yk.min() == yk.max():
                positive = bool(yk[0])
                warnings.warn(
                    f"classifier {k}: all training labels are "
                    f"{'above' if positive else 'at or below'} {k}; using a constant scorer"
                )
                self.scorers_.append(_constant_like(base, positive, X.shape[1]))
            else:
                self.scorers_.append(clone(base).fit(X, yk))
        return self

    def margins(self, X) -> np.ndarray:
        """(n, 4) matrix of per-classifier log-odds margins."""
        check_is_fitted(self, "scorers_")
        X = check_array(X, dtype=np.float64)
        return np.column_stack([s.decision_function(X) for s in self.scorers_])

    def exceed_probs(self, X) -> np.ndarray:
        """(n, 4) matrix of Pr(rating > k) for k = 1..4."""
        return sigmoid(self.margins(X))

    def predict(self, X) -> np.ndarray:
        return consistent_label(self.exceed_probs(X), self.thresholds_)

    def tune_thresholds(self, X, y) -> "OrdinalRatingClassifier":
        """Per-classifier grid search minimizing validation macro MAE.

        Thresholds are tuned in classifier order with earlier choices frozen.
        Ties prefer the candidate closest to 0.5, then the smaller one.
        """
        check_is_fitted(self, "scorers_")
        P = self.exceed_probs(X)
        y = np.asarray(y, dtype=np.int64)
        chosen = self.thresholds_.copy()
        for k in range(N_CLASSIFIERS):
            best_key = None
            best_theta = chosen[k]
            for theta in THRESHOLD_GRID:
                trial = chosen.copy()
                trial[k] = theta
                key = (mamae(consistent_label(P, trial), y), abs(theta - 0.5), theta)
                if best_key is None or key < best_key:
                    best_key = key
                    best_theta = theta
            chosen[k] = best_theta
        self.thresholds_ = chosen
        return self


def _check_thresholds(thresholds) -> np.ndarray:
    t = np.asarray(thresholds, dtype=np.float64)
    if t.shape != (N_CLASSIFIERS,):
        raise ModelError(f"expected {N_CLASSIFIERS} thresholds, got shape {t.shape}")
    if np.any(t <= 0.0) or np.any(t >= 1.0):
        raise ModelError("thresholds must lie strictly between 0 and 1")
    return t


@dataclass
class RatingModel:
    """A fitted ordinal classifier bound to the feature schema it was trained on."""

    schema: FeatureSchema
    ordinal: OrdinalRatingClassifier
    base_kind: str

    def rate(self, X) -> np.ndarray:
        return self.ordinal.predict(X)

    def exceed_probs(self, X) -> np.ndarray:
        return self.ordinal.exceed_probs(X)

    def margins(self, X) -> np.ndarray:
        return self.ordinal.margins(X)

    @property
    def thresholds(self) -> np.ndarray:
        return self.ordinal.thresholds_

    def scorer(self, k: int):
        """The fitted binary scorer for classifier ``k`` (1-based)."""
        if not 1 <= k <= N_CLASSIFIERS:
            raise ModelError(f"classifier index must be in 1..{N_CLASSIFIERS}")
        return self.ordinal.scorers_[k - 1]

    def to_json_obj(self) -> dict:
        classifiers = []
        for scorer in self.ordinal.scorers_:
            if self.base_kind == BASE_GBT:
                classifiers.append(
                    {
                        "base_margin": scorer.base_margin_,
                        "trees": [t.to_dict() for t in scorer.trees_],
                    }
                )
            else:
                classifiers.append(
                    {
                        "base_margin": scorer.intercept_,
                        "weights": scorer.coef_.tolist(),
                        "feature_means": scorer.mean_.tolist(),
                        "feature_scales": scorer.scale_.tolist(),
                    }
                )
        return {
            "version": MODEL_VERSION,
            "schema": self.schema.to_json_obj(),
            "thresholds": [float(t) for t in self.ordinal.thresholds_],
            "classifiers": classifiers,
            "base_kind": self.base_kind,
        }

    def save(self, path: str | Path) -> None:
        obj = self.to_json_obj()
        Path(path).write_text(
            json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def from_json_obj(cls, obj) -> "RatingModel":
        if not isinstance(obj, dict):
            raise ModelError("model file must contain a JSON object")
        if obj.get("version") != MODEL_VERSION:
            raise ModelError(f"unsupported model version: {obj.get('version')!r}")
        missing = {"schema", "thresholds", "classifiers", "base_kind"} - set(obj)
        if missing:
            raise ModelError(f"model file missing keys: {sorted(missing)}")
        base_kind = obj["base_kind"]
        if base_kind not in (BASE_GBT, BASE_LOGISTIC):
            raise ModelError(f"unknown base_kind: {base_kind!r}")
        schema = FeatureSchema.from_json_obj(obj["schema"])
        thresholds = _check_thresholds(obj["thresholds"])
        entries = obj["classifiers"]
        if not isinstance(entries, list) or len(entries) != N_CLASSIFIERS:
            raise ModelError(f"model must contain exactly {N_CLASSIFIERS} classifiers")
        n_features = len(schema)
        scorers = []
        for pos, entry in enumerate(entries, start=1):
            if not isinstance(entry, dict) or "base_margin" not in entry:
                raise ModelError(f"classifier {pos}: missing base_margin")
            if base_kind == BASE_GBT:
                trees_obj = entry.get("trees")
                if not isinstance(trees_obj, list):
                    raise ModelError(f"classifier {pos}: 'trees' must be a list")
                trees = [TreeNode.from_dict(t, n_features) for t in trees_obj]
                scorers.append(
                    MonotoneBoostedTrees.from_parts(
                        entry["base_margin"], trees, n_features,
                        monotone=schema.monotone_vector(),
                    )
                )
            else:
                for key in ("weights", "feature_means", "feature_scales"):
                    arr = entry.get(key)
                    if not isinstance(arr, list) or len(arr) != n_features:
                        raise ModelError(
                            f"classifier {pos}: {key!r} must list one value per feature"
                        )
                if any(s <= 0 for s in entry["feature_scales"]):
                    raise ModelError(f"classifier {pos}: feature_scales must be positive")
                scorers.append(
                    LogisticScorer.from_parts(
                        entry["base_margin"],
                        entry["weights"],
                        entry["feature_means"],
                        entry["feature_scales"],
                    )
                )
        ordinal = OrdinalRatingClassifier()
        ordinal.scorers_ = scorers
        ordinal.thresholds_ = thresholds
        ordinal.n_features_in_ = n_features
        ordinal.classes_ = np.arange(1, N_CLASSES + 1)
        return cls(schema=schema, ordinal=ordinal, base_kind=base_kind)

    @classmethod
    def load(cls, path: str | Path) -> "RatingModel":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: invalid JSON: {exc.msg}") from None
        return cls.from_json_obj(obj)


def fit_rating_model(
    ds: Dataset,
    base_kind: str = BASE_GBT,
    base_estimator=None,
    thresholds=None,
) -> RatingModel:
    """Train a :class:`RatingModel` on a labeled dataset.

    With the default GBT base, the schema's +1 flags become monotone
    constraints. Pass ``base_estimator`` to override hyperparameters.
    """
    if ds.labels is None:
        raise ModelError("training requires a labeled dataset")
    if base_kind not in (BASE_GBT, BASE_LOGISTIC):
        raise ModelError(f"unknown base_kind: {base_kind!r}")
    if base_estimator is None:
        if base_kind == BASE_GBT:
            base_estimator = MonotoneBoostedTrees(monotone=ds.schema.monotone_vector())
        else:
            base_estimator = LogisticScorer()
    ordinal = OrdinalRatingClassifier(base_estimator=base_estimator, thresholds=thresholds)
    ordinal.fit(ds.feature_matrix(), ds.labels)
    return RatingModel(schema=ds.schema, ordinal=ordinal, base_kind=base_kind)
