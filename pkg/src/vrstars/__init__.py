"""Explainable 1-5 star quality ratings for vacation rentals.

The pipeline: transfer star labels from hotels to rentals through shared
guests, train four monotone boosted classifiers arranged as an ordinal model,
and serve ratings with Shapley explanations and amenity suggestions.
"""
from .costay import (
    DEFAULT_MIN_SUPPORT,
    LabelingError,
    StayGraph,
    build_stay_graph,
    label_rows,
    mode_label,
    propagate_labels,
    star_distribution,
)
from .data import (
    DataError,
    Dataset,
    PropertyRecord,
    StayTable,
    features_from_mapping,
    load_labels,
    load_properties,
    load_stays,
    split_dataset,
    write_labels,
    write_properties,
    write_stays,
)
from .gbt import MonotoneBoostedTrees, sigmoid
from .linear import LogisticScorer
from .metrics import (
    EvalReport,
    MetricsError,
    ModeClassifier,
    accuracy,
    confusion_matrix,
    evaluate_ratings,
    format_report,
    mamae,
    mode_class,
    per_class_mae,
    weighted_f1,
)
from .ordinal import (
    BASE_GBT,
    BASE_LOGISTIC,
    ModelError,
    OrdinalRatingClassifier,
    RatingModel,
    consistent_label,
    expand_labels,
    fit_rating_model,
    responsible_classifier,
)
from .schema import FeatureSchema, FeatureSpec, SchemaError, validate_rating
from .shapley import (
    Explanation,
    ShapError,
    brute_force_shap,
    compute_explanation,
    tree_shap,
)
from .suggest import (
    Suggestion,
    SuggestError,
    apply_suggestion,
    compute_suggestions,
    suggestion_target,
)
from .synth import SynthConfig, default_schema, generate_synthetic
from .trees import TreeNode

__version__ = "0.1.0"

__all__ = [
    "BASE_GBT",
    "BASE_LOGISTIC",
    "DEFAULT_MIN_SUPPORT",
    "DataError",
    "Dataset",
    "EvalReport",
    "Explanation",
    "FeatureSchema",
    "FeatureSpec",
    "LabelingError",
    "LogisticScorer",
    "MetricsError",
    "ModeClassifier",
    "ModelError",
    "MonotoneBoostedTrees",
    "OrdinalRatingClassifier",
    "PropertyRecord",
    "RatingModel",
    "SchemaError",
    "ShapError",
    "StayGraph",
    "StayTable",
    "SuggestError",
    "Suggestion",
    "SynthConfig",
    "TreeNode",
    "accuracy",
    "apply_suggestion",
    "brute_force_shap",
    "build_stay_graph",
    "compute_explanation",
    "compute_suggestions",
    "confusion_matrix",
    "consistent_label",
    "default_schema",
    "evaluate_ratings",
    "expand_labels",
    "features_from_mapping",
    "fit_rating_model",
    "format_report",
    "generate_synthetic",
    "label_rows",
    "load_labels",
    "load_properties",
    "load_stays",
    "mamae",
    "mode_class",
    "mode_label",
    "per_class_mae",
    "propagate_labels",
    "responsible_classifier",
    "sigmoid",
    "split_dataset",
    "star_distribution",
    "suggestion_target",
    "tree_shap",
    "validate_rating",
    "weighted_f1",
    "write_labels",
    "write_properties",
    "write_stays",
]
