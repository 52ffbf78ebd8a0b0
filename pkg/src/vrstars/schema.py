"""Feature catalog shared by datasets, models, and the service layer.

A schema is an ordered list of feature definitions. The position of a feature
in the list is its id, and every feature vector in the system is indexed the
same way. Binary features are amenity-style 0/1 flags; numeric features are
real-valued. A feature may carry a nondecreasing monotone constraint (+1), and
binary +1 features may additionally be marked suggestible, meaning the product
may propose adding them to a listing.
"""
from __future__ import annotations

import json
import numbers
from dataclasses import dataclass
from pathlib import Path

KIND_BINARY = "binary"
KIND_NUMERIC = "numeric"

RATING_CLASSES = (1, 2, 3, 4, 5)
N_CLASSES = 5


class SchemaError(ValueError):
    """Raised for malformed feature definitions or schema files."""


def validate_rating(value: int) -> int:
    """Check that ``value`` is a whole rating class in 1..5 and return it."""
    if (
        isinstance(value, bool)
        or not isinstance(value, numbers.Real)
        or not float(value).is_integer()
    ):
        raise SchemaError(f"rating class must be an integer in 1..5, got {value!r}")
    value = int(value)
    if not 1 <= value <= N_CLASSES:
        raise SchemaError(f"rating class must be in 1..5, got {value}")
    return value


@dataclass(frozen=True)
class FeatureSpec:
    """One feature definition: stable id, name, kind, and constraint flags."""

    id: int
    name: str
    kind: str
    monotone: int = 0
    suggestible: bool = False

    def __post_init__(self) -> None:
        if self.kind not in (KIND_BINARY, KIND_NUMERIC):
            raise SchemaError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.monotone not in (0, 1):
            raise SchemaError(
                f"feature {self.name!r}: monotone must be 0 or 1, got {self.monotone!r}"
            )
        if not self.name:
            raise SchemaError("feature name must be non-empty")
        if self.suggestible and not (self.kind == KIND_BINARY and self.monotone == 1):
            raise SchemaError(
                f"feature {self.name!r}: suggestible requires a binary +1 feature"
            )


class FeatureSchema:
    """Ordered, validated collection of :class:`FeatureSpec`.

    Feature ids must be contiguous 0..n-1 and match list positions; names must
    be unique. Instances are immutable in spirit: treat them as read-only.
    """

    def __init__(self, specs: list[FeatureSpec] | tuple[FeatureSpec, ...]):
        specs = tuple(specs)
        if not specs:
            raise SchemaError("schema must contain at least one feature")
        for pos, spec in enumerate(specs):
            if spec.id != pos:
                raise SchemaError(
                    f"feature ids must be contiguous: position {pos} has id {spec.id}"
                )
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate feature names: {dupes}")
        self.specs = specs
        self._index = {s.name: s.id for s in specs}

    def __len__(self) -> int:
        return len(self.specs)

    def __iter__(self):
        return iter(self.specs)

    def __getitem__(self, fid: int) -> FeatureSpec:
        return self.specs[fid]

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureSchema) and self.specs == other.specs

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.specs)

    def index(self, name: str) -> int:
        """Feature id for ``name``; raises :class:`SchemaError` if unknown."""
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown feature name: {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def binary_ids(self) -> list[int]:
        return [s.id for s in self.specs if s.kind == KIND_BINARY]

    def numeric_ids(self) -> list[int]:
        return [s.id for s in self.specs if s.kind == KIND_NUMERIC]

    def monotone_ids(self) -> list[int]:
        return [s.id for s in self.specs if s.monotone == 1]

    def suggestible_ids(self) -> list[int]:
        return [s.id for s in self.specs if s.suggestible]

    def monotone_vector(self) -> list[int]:
        """Per-feature constraint flags (0 or 1) in id order."""
        return [s.monotone for s in self.specs]

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "name": s.name,
                "kind": s.kind,
                "monotone": s.monotone,
                "suggestible": s.suggestible,
            }
            for s in self.specs
        ]

    @classmethod
    def from_json_obj(cls, obj) -> "FeatureSchema":
        if not isinstance(obj, list):
            raise SchemaError("schema file must contain a JSON array")
        specs = []
        for pos, entry in enumerate(obj):
            if not isinstance(entry, dict):
                raise SchemaError(f"schema entry {pos} is not an object")
            unknown = set(entry) - {"name", "kind", "monotone", "suggestible"}
            if unknown:
                raise SchemaError(f"schema entry {pos}: unknown keys {sorted(unknown)}")
            monotone = entry.get("monotone", 0)
            suggestible = entry.get("suggestible", False)
            if isinstance(monotone, bool) or not isinstance(monotone, int):
                raise SchemaError(f"schema entry {pos}: monotone must be 0 or 1")
            if not isinstance(suggestible, bool):
                raise SchemaError(f"schema entry {pos}: suggestible must be a boolean")
            if not isinstance(entry.get("name"), str):
                raise SchemaError(f"schema entry {pos}: missing or non-string name")
            try:
                specs.append(
                    FeatureSpec(
                        id=pos,
                        name=entry["name"],
                        kind=entry["kind"],
                        monotone=monotone,
                        suggestible=suggestible,
                    )
                )
            except KeyError as exc:
                raise SchemaError(f"schema entry {pos}: missing key {exc}") from None
        return cls(specs)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_obj(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSchema":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_json_obj(obj)
