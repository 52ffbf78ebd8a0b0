"""Command-line pipeline: generate data, transfer labels, train, score, explain.

Every subcommand is deterministic given ``--seed``: running the same
invocation twice produces byte-identical output files. ``--threads`` is
accepted for interface compatibility and never changes any output.
Diagnostics go to stderr; files and the evaluation table are the only
stdout/artifact surface.
"""
from __future__ import annotations

import json
import logging
import os
import sys

import click
import numpy as np

from . import __version__
from .costay import LabelingError, label_rows
from .data import (
    KIND_VR,
    DataError,
    Dataset,
    load_labels,
    load_properties,
    load_stays,
    write_labels,
    write_properties,
    write_stays,
)
from .gbt import MonotoneBoostedTrees
from .linear import LogisticScorer
from .metrics import evaluate_ratings, format_report
from .ordinal import ModelError, RatingModel, fit_rating_model
from .schema import FeatureSchema, SchemaError, validate_rating
from .shapley import compute_explanation
from .suggest import compute_suggestions
from .synth import SynthConfig, generate_synthetic

log = logging.getLogger("vrstars")

_FAILURES = (DataError, SchemaError, ModelError, LabelingError, OSError, ValueError)


def _common(fn):
    fn = click.option(
        "--log-level",
        default="warning",
        show_default=True,
        type=click.Choice(["debug", "info", "warning", "error"]),
        help="Verbosity of stderr diagnostics.",
    )(fn)
    fn = click.option(
        "--threads",
        type=click.IntRange(min=1),
        default=1,
        show_default=True,
        help="Accepted for compatibility; execution is single-threaded and "
        "outputs never depend on this value.",
    )(fn)
    fn = click.option(
        "--seed",
        type=int,
        default=0,
        show_default=True,
        help="Seed for every randomized step of this command.",
    )(fn)
    return fn


def _setup_logging(log_level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Star-rating pipeline for vacation rentals."""


@main.command()
@click.option("--out-properties", default="properties.jsonl", show_default=True)
@click.option("--out-stays", default="stays.csv", show_default=True)
@click.option("--out-schema", default="schema.json", show_default=True)
@click.option(
    "--out-truth",
    default="truth.jsonl",
    show_default=True,
    help="True classes of all generated properties, as {id, label} lines.",
)
@click.option("--n-properties", type=click.IntRange(min=1), default=20_000, show_default=True)
@click.option("--hotel-fraction", type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True)
@click.option("--underreport-rate", type=click.FloatRange(0.0, 1.0), default=0.15, show_default=True)
@click.option("--n-guests", type=click.IntRange(min=0), default=5_000, show_default=True)
@click.option("--stays-per-guest", type=click.IntRange(min=0), default=8, show_default=True)
@click.option("--guest-noise", type=click.FloatRange(0.0, 1.0), default=0.1, show_default=True)
@_common
def synth(
    out_properties,
    out_stays,
    out_schema,
    out_truth,
    n_properties,
    hotel_fraction,
    underreport_rate,
    n_guests,
    stays_per_guest,
    guest_noise,
    seed,
    threads,
    log_level,
):
    """Generate a synthetic marketplace: properties, stays, schema, truth."""
    _setup_logging(log_level)
    try:
        cfg = SynthConfig(
            n_properties=n_properties,
            hotel_fraction=hotel_fraction,
            underreport_rate=underreport_rate,
            n_guests=n_guests,
            stays_per_guest=stays_per_guest,
            guest_noise=guest_noise,
            seed=seed,
        )
        ds, stays, truth = generate_synthetic(cfg)
        ds.schema.save(out_schema)
        write_properties(ds, out_properties)
        write_stays(stays, out_stays)
        with open(out_truth, "w", encoding="utf-8") as fh:
            for rec, z in zip(ds.records, truth):
                fh.write(json.dumps({"id": rec.property_id, "label": int(z)}) + "\n")
    except _FAILURES as exc:
        raise _fail(exc)
    log.info("wrote %d properties, %d stays", len(ds.records), len(stays))


@main.command()
@click.option("--properties", "properties_path", required=True, type=click.Path(exists=True))
@click.option("--stays", "stays_path", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="labels.jsonl", show_default=True)
@click.option(
    "--min-support",
    type=click.FloatRange(min=0.0),
    default=3.0,
    show_default=True,
    help="Minimum total co-stay weight before a rental gets a label.",
)
@_common
def label(properties_path, stays_path, schema_path, out_path, min_support, seed, threads, log_level):
    """Propagate hotel stars to vacation rentals over the co-stay graph."""
    _setup_logging(log_level)
    try:
        schema = FeatureSchema.load(schema_path)
        ds = load_properties(properties_path, schema)
        stays = load_stays(stays_path)
        rows = label_rows(ds, stays, min_support=min_support)
        write_labels(out_path, rows)
    except _FAILURES as exc:
        raise _fail(exc)
    n_vr = sum(1 for r in ds.records if r.kind == KIND_VR)
    log.info("labeled %d of %d rentals", len(rows), n_vr)


def _labeled_dataset(ds: Dataset, labels_path: str | None) -> Dataset:
    """Attach training labels: a labels file wins, official stars otherwise."""
    if labels_path is not None:
        mapping = load_labels(labels_path)
        kept = [i for i, r in enumerate(ds.records) if r.property_id in mapping]
        labels = [mapping[ds.records[i].property_id] for i in kept]
    else:
        kept = [i for i, r in enumerate(ds.records) if r.official_stars is not None]
        labels = [ds.records[i].official_stars for i in kept]
    if not kept:
        raise ModelError("no labeled records to train on")
    return ds.subset(kept).with_labels(np.asarray(labels, dtype=np.int64))


@main.command()
@click.option("--properties", "properties_path", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option(
    "--labels",
    "labels_path",
    type=click.Path(exists=True),
    help="labels.jsonl with training labels; without it, properties with "
    "official stars are the training set.",
)
@click.option("--out", "out_path", default="model.json", show_default=True)
@click.option(
    "--base",
    type=click.Choice(["gbt", "logistic"]),
    default="gbt",
    show_default=True,
    help="Binary scorer family for the four classifiers.",
)
@click.option("--n-rounds", type=click.IntRange(min=0), default=100, show_default=True)
@click.option("--learning-rate", type=click.FloatRange(min=0.0, min_open=True), default=0.1, show_default=True)
@click.option("--max-depth", type=click.IntRange(min=1), default=4, show_default=True)
@click.option(
    "--tune-thresholds/--no-tune-thresholds",
    default=False,
    show_default=True,
    help="Grid-search decision thresholds on the training set after fitting.",
)
@_common
def train(
    properties_path,
    schema_path,
    labels_path,
    out_path,
    base,
    n_rounds,
    learning_rate,
    max_depth,
    tune_thresholds,
    seed,
    threads,
    log_level,
):
    """Train the four-classifier rating model and save it as model.json."""
    _setup_logging(log_level)
    try:
        schema = FeatureSchema.load(schema_path)
        ds = _labeled_dataset(load_properties(properties_path, schema), labels_path)
        if base == "gbt":
            est = MonotoneBoostedTrees(
                n_rounds=n_rounds,
                learning_rate=learning_rate,
                max_depth=max_depth,
                seed=seed,
                monotone=schema.monotone_vector(),
            )
        else:
            est = LogisticScorer(seed=seed)
        model = fit_rating_model(ds, base_kind=base, base_estimator=est)
        if tune_thresholds:
            model.ordinal.tune_thresholds(ds.feature_matrix(), ds.labels)
        model.save(out_path)
    except _FAILURES as exc:
        raise _fail(exc)
    log.info("trained %s model on %d records", base, len(ds.records))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--properties", "properties_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="preds.jsonl", show_default=True)
@_common
def predict(model_path, properties_path, out_path, seed, threads, log_level):
    """Rate properties; one {id, rating, probs} line per input."""
    _setup_logging(log_level)
    try:
        model = RatingModel.load(model_path)
        ds = load_properties(properties_path, model.schema)
        X = ds.feature_matrix()
        ratings = model.rate(X)
        probs = model.exceed_probs(X)
        with open(out_path, "w", encoding="utf-8") as fh:
            for rec, r, p in zip(ds.records, ratings, probs):
                obj = {"id": rec.property_id, "rating": int(r), "probs": [float(v) for v in p]}
                fh.write(json.dumps(obj) + "\n")
    except _FAILURES as exc:
        raise _fail(exc)
    log.info("rated %d properties", len(ds.records))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--properties", "properties_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="explanations.jsonl", show_default=True)
@_common
def explain(model_path, properties_path, out_path, seed, threads, log_level):
    """Explain each property's rating via the responsible classifier."""
    _setup_logging(log_level)
    try:
        model = RatingModel.load(model_path)
        ds = load_properties(properties_path, model.schema)
        with open(out_path, "w", encoding="utf-8") as fh:
            for rec in ds.records:
                exp = compute_explanation(model, rec.features)
                obj = {
                    "id": rec.property_id,
                    "rating": int(exp.rating),
                    "responsible_k": int(exp.responsible),
                    "base_value": float(exp.base_value),
                    "items": [{"feature": n, "shap": v} for n, v in exp.top_items()],
                    "probability": float(exp.probability),
                    "method": exp.method,
                }
                fh.write(json.dumps(obj) + "\n")
    except _FAILURES as exc:
        raise _fail(exc)
    log.info("explained %d properties", len(ds.records))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--properties", "properties_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="suggestions.jsonl", show_default=True)
@_common
def suggest(model_path, properties_path, out_path, seed, threads, log_level):
    """Rank absent amenities by how much adding each would help."""
    _setup_logging(log_level)
    try:
        model = RatingModel.load(model_path)
        ds = load_properties(properties_path, model.schema)
        X = ds.feature_matrix()
        ratings = model.rate(X)
        with open(out_path, "w", encoding="utf-8") as fh:
            for rec, r in zip(ds.records, ratings):
                items = compute_suggestions(model, rec.features, rating=int(r))
                obj = {
                    "id": rec.property_id,
                    "current_rating": int(r),
                    "items": [{"feature": s.feature, "increment": s.increment} for s in items],
                }
                fh.write(json.dumps(obj) + "\n")
    except _FAILURES as exc:
        raise _fail(exc)
    log.info("suggested for %d properties", len(ds.records))


def _read_predictions(path: str) -> dict[str, int]:
    out: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict) or "id" not in obj or "rating" not in obj:
                raise DataError(f"{where}: expected an object with 'id' and 'rating'")
            if obj["id"] in out:
                raise DataError(f"{where}: duplicate id {obj['id']!r}")
            try:
                out[obj["id"]] = validate_rating(obj["rating"])
            except SchemaError as exc:
                raise DataError(f"{where}: {exc}") from None
    return out


def _read_truth(path: str) -> dict[str, int]:
    """True classes from either a labels file or a properties file with stars."""
    out: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON: {exc.msg}") from None
            if not isinstance(obj, dict) or "id" not in obj:
                raise DataError(f"{where}: expected an object with 'id'")
            value = obj.get("label", obj.get("stars"))
            if value is None:
                continue
            if obj["id"] in out:
                raise DataError(f"{where}: duplicate id {obj['id']!r}")
            try:
                out[obj["id"]] = validate_rating(value)
            except SchemaError as exc:
                raise DataError(f"{where}: {exc}") from None
    return out


@main.command()
@click.option("--preds", "preds_path", required=True, type=click.Path(exists=True))
@click.option(
    "--truth",
    "truth_path",
    required=True,
    type=click.Path(exists=True),
    help="labels.jsonl, a truth file, or a properties file with stars.",
)
@click.option("--out", "out_path", default="report.json", show_default=True)
@_common
def evaluate(preds_path, truth_path, out_path, seed, threads, log_level):
    """Score predictions against true classes and print the report table."""
    _setup_logging(log_level)
    try:
        preds = _read_predictions(preds_path)
        truth = _read_truth(truth_path)
        ids = [pid for pid in preds if pid in truth]
        if not ids:
            raise DataError("no overlapping ids between predictions and truth")
        y_pred = np.asarray([preds[pid] for pid in ids], dtype=np.int64)
        y_true = np.asarray([truth[pid] for pid in ids], dtype=np.int64)
        report = evaluate_ratings(y_pred, y_true)
        report.save(out_path)
    except _FAILURES as exc:
        raise _fail(exc)
    log.info("evaluated %d of %d predictions", len(ids), len(preds))
    click.echo(format_report(report))


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--port",
    type=click.IntRange(1, 65535),
    default=8000,
    show_default=True,
    help="Bind port; the PORT environment variable overrides this flag.",
)
@_common
def serve(model_path, host, port, seed, threads, log_level):
    """Serve the rating model over HTTP (rate, explain, suggest, what-if)."""
    _setup_logging(log_level)
    import uvicorn

    from .service import build_app, install_sighup_reload

    try:
        app = build_app(model_path)
    except _FAILURES as exc:
        raise _fail(exc)
    install_sighup_reload(app)
    env_port = os.environ.get("PORT")
    if env_port is not None:
        try:
            port = int(env_port)
        except ValueError:
            raise click.ClickException(f"PORT must be an integer, got {env_port!r}")
    uvicorn.run(app, host=host, port=port, log_level=log_level)


if __name__ == "__main__":
    main()
