"""Property records, datasets, stay tables, and their file formats.

Files on disk:

* ``properties.jsonl`` — one JSON object per line:
  ``{"id": str, "kind": "hotel"|"vr", "stars": int|null, "features": {name: number}}``.
  Missing binary features default to 0; missing numeric features are an error.
* ``stays.csv`` — header ``guest_id,property_id``; a repeated row is a repeated
  stay.
* ``labels.jsonl`` — ``{"id": str, "label": int, "support": number}`` per line.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .schema import (
    KIND_BINARY,
    KIND_NUMERIC,
    FeatureSchema,
    SchemaError,
    validate_rating,
)

KIND_HOTEL = "hotel"
KIND_VR = "vacation_rental"

_FILE_KINDS = {"hotel": KIND_HOTEL, "vr": KIND_VR}
_KIND_TO_FILE = {v: k for k, v in _FILE_KINDS.items()}


class DataError(ValueError):
    """Raised for malformed property, stay, or label files."""


def features_from_mapping(schema: FeatureSchema, mapping: dict, where: str = "") -> np.ndarray:
    """Build a validated feature vector from a name->value mapping.

    Unknown names, missing numerics, non-0/1 binaries, and non-finite values
    are rejected. Missing binary features default to 0. ``where`` prefixes
    error messages so callers can point at a file line or request field.
    """
    prefix = f"{where}: " if where else ""
    if not isinstance(mapping, dict):
        raise DataError(f"{prefix}features must be an object")
    vec = np.zeros(len(schema), dtype=np.float64)
    for name, value in mapping.items():
        if name not in schema:
            raise DataError(f"{prefix}unknown feature name: {name!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DataError(f"{prefix}feature {name!r}: value must be a number")
        vec[schema.index(name)] = float(value)
    for spec in schema:
        v = vec[spec.id]
        if not np.isfinite(v):
            raise DataError(f"{prefix}feature {spec.name!r}: non-finite value")
        if spec.kind == KIND_BINARY:
            if v not in (0.0, 1.0):
                raise DataError(
                    f"{prefix}binary feature {spec.name!r} must be 0 or 1, got {v}"
                )
        elif spec.name not in mapping:
            raise DataError(f"{prefix}missing numeric feature {spec.name!r}")
    return vec


@dataclass
class PropertyRecord:
    """One accommodation: id, kind, optional official stars, feature vector."""

    property_id: str
    kind: str
    official_stars: int | None
    features: np.ndarray

    def validate(self, schema: FeatureSchema) -> None:
        if self.kind not in (KIND_HOTEL, KIND_VR):
            raise DataError(f"{self.property_id}: unknown kind {self.kind!r}")
        if self.official_stars is not None:
            validate_rating(self.official_stars)
        if self.features.shape != (len(schema),):
            raise DataError(
                f"{self.property_id}: feature vector has length "
                f"{self.features.shape}, schema has {len(schema)}"
            )
        if not np.all(np.isfinite(self.features)):
            raise DataError(f"{self.property_id}: non-finite feature value")
        for fid in schema.binary_ids():
            if self.features[fid] not in (0.0, 1.0):
                raise DataError(
                    f"{self.property_id}: binary feature "
                    f"{schema[fid].name!r} must be 0 or 1"
                )


@dataclass
class Dataset:
    """Schema plus aligned property records and optional labels.

    ``labels`` is either ``None`` or an int array aligned with ``records``.
    Treat instances as read-only once built; derived arrays are cached.
    """

    schema: FeatureSchema
    records: list[PropertyRecord]
    labels: np.ndarray | None = None
    _X: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (len(self.records),):
                raise DataError("labels must align one-to-one with records")
            for v in self.labels:
                validate_rating(int(v))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.property_id for r in self.records]

    def feature_matrix(self) -> np.ndarray:
        if self._X is None:
            X = np.vstack([r.features for r in self.records]) if self.records else (
                np.zeros((0, len(self.schema)))
            )
            X.setflags(write=False)
            self._X = X
        return self._X

    def validate(self) -> None:
        seen: set[str] = set()
        for rec in self.records:
            if rec.property_id in seen:
                raise DataError(f"duplicate property id: {rec.property_id}")
            seen.add(rec.property_id)
            rec.validate(self.schema)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            schema=self.schema,
            records=[self.records[i] for i in indices],
            labels=None if self.labels is None else self.labels[indices],
        )

    def hotels(self) -> "Dataset":
        return self.subset([i for i, r in enumerate(self.records) if r.kind == KIND_HOTEL])

    def vacation_rentals(self) -> "Dataset":
        return self.subset([i for i, r in enumerate(self.records) if r.kind == KIND_VR])

    def with_labels(self, labels) -> "Dataset":
        return Dataset(schema=self.schema, records=self.records, labels=labels)


@dataclass(frozen=True)
class StayTable:
    """Immutable list of (guest_id, property_id) stay events."""

    guest_ids: tuple[str, ...]
    property_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.guest_ids) != len(self.property_ids):
            raise DataError("stay table columns must have equal length")

    def __len__(self) -> int:
        return len(self.guest_ids)

    def __iter__(self):
        return iter(zip(self.guest_ids, self.property_ids))


def load_properties(path: str | Path, schema: FeatureSchema) -> Dataset:
    """Read ``properties.jsonl``; errors mention the offending 1-based line."""
    records: list[PropertyRecord] = []
    seen: set[str] = set()
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
            if not isinstance(obj, dict):
                raise DataError(f"{where}: expected a JSON object")
            for key in ("id", "kind", "features"):
                if key not in obj:
                    raise DataError(f"{where}: missing key {key!r}")
            pid = obj["id"]
            if not isinstance(pid, str) or not pid:
                raise DataError(f"{where}: id must be a non-empty string")
            if pid in seen:
                raise DataError(f"{where}: duplicate property id {pid!r}")
            seen.add(pid)
            if obj["kind"] not in _FILE_KINDS:
                raise DataError(
                    f"{where}: kind must be one of {sorted(_FILE_KINDS)}, got {obj['kind']!r}"
                )
            stars = obj.get("stars")
            if stars is not None:
                try:
                    stars = validate_rating(stars)
                except SchemaError as exc:
                    raise DataError(f"{where}: {exc}") from None
            vec = features_from_mapping(schema, obj["features"], where=where)
            records.append(
                PropertyRecord(
                    property_id=pid,
                    kind=_FILE_KINDS[obj["kind"]],
                    official_stars=stars,
                    features=vec,
                )
            )
    return Dataset(schema=schema, records=records)


def write_properties(ds: Dataset, path: str | Path) -> None:
    """Write ``properties.jsonl``; inverse of :func:`load_properties`."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in ds.records:
            feats = {}
            for spec in ds.schema:
                v = rec.features[spec.id]
                feats[spec.name] = int(v) if spec.kind == KIND_BINARY else float(v)
            obj = {
                "id": rec.property_id,
                "kind": _KIND_TO_FILE[rec.kind],
                "stars": rec.official_stars,
                "features": feats,
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_stays(path: str | Path) -> StayTable:
    guests: list[str] = []
    props: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty stays file") from None
        if header != ["guest_id", "property_id"]:
            raise DataError(
                f"{path}: expected header 'guest_id,property_id', got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 or not row[0] or not row[1]:
                raise DataError(f"{path}:{lineno}: expected 'guest_id,property_id'")
            guests.append(row[0])
            props.append(row[1])
    return StayTable(guest_ids=tuple(guests), property_ids=tuple(props))


def write_stays(stays: StayTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["guest_id", "property_id"])
        for guest, prop in stays:
            writer.writerow([guest, prop])


def load_labels(path: str | Path) -> dict[str, int]:
    """Read ``labels.jsonl`` into an id -> label mapping."""
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
            if not isinstance(obj, dict) or "id" not in obj or "label" not in obj:
                raise DataError(f"{where}: expected an object with 'id' and 'label'")
            if obj["id"] in out:
                raise DataError(f"{where}: duplicate id {obj['id']!r}")
            try:
                out[obj["id"]] = validate_rating(obj["label"])
            except SchemaError as exc:
                raise DataError(f"{where}: {exc}") from None
    return out


def write_labels(path: str | Path, rows: list[tuple[str, int, float]]) -> None:
    """Write ``labels.jsonl`` rows of (id, label, support)."""
    with open(path, "w", encoding="utf-8") as fh:
        for pid, label, support in rows:
            support_out = int(support) if float(support).is_integer() else float(support)
            obj = {"id": pid, "label": int(label), "support": support_out}
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def split_dataset(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic stratified split of a labeled dataset.

    Per-class counts are rounded, so label proportions match within one record
    per class. ``train_fraction`` must lie strictly between 0 and 1.
    """
    if ds.labels is None:
        raise DataError("split_dataset requires a labeled dataset")
    if not 0.0 < train_fraction < 1.0:
        raise DataError(
            f"train_fraction must be strictly between 0 and 1, got {train_fraction}"
        )
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    val_idx: list[int] = []
    for cls in sorted(set(int(v) for v in ds.labels)):
        members = np.flatnonzero(ds.labels == cls)
        members = members[rng.permutation(len(members))]
        k = int(round(train_fraction * len(members)))
        train_idx.extend(members[:k].tolist())
        val_idx.extend(members[k:].tolist())
    return ds.subset(sorted(train_idx)), ds.subset(sorted(val_idx))
