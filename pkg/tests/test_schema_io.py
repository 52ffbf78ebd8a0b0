"""Schema invariants, rating validation, and file ingestion round trips."""
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vrstars import (
    DataError,
    Dataset,
    FeatureSchema,
    FeatureSpec,
    PropertyRecord,
    SchemaError,
    features_from_mapping,
    load_labels,
    load_properties,
    load_stays,
    split_dataset,
    validate_rating,
    write_labels,
    write_properties,
    write_stays,
)
from vrstars.data import StayTable

from conftest import make_schema


def two_feature_schema():
    return FeatureSchema(
        [
            FeatureSpec(id=0, name="balcony", kind="binary", monotone=1, suggestible=True),
            FeatureSpec(id=1, name="size_m2", kind="numeric", monotone=1, suggestible=False),
        ]
    )


class TestFeatureSpec:
    def test_suggestible_requires_binary(self):
        with pytest.raises(SchemaError):
            FeatureSpec(id=0, name="size", kind="numeric", monotone=1, suggestible=True)

    def test_suggestible_requires_monotone(self):
        with pytest.raises(SchemaError):
            FeatureSpec(id=0, name="tv", kind="binary", monotone=0, suggestible=True)

    def test_bad_kind_rejected(self):
        with pytest.raises(SchemaError):
            FeatureSpec(id=0, name="x", kind="categorical", monotone=0, suggestible=False)

    def test_bad_monotone_rejected(self):
        with pytest.raises(SchemaError):
            FeatureSpec(id=0, name="x", kind="binary", monotone=-1, suggestible=False)


class TestFeatureSchema:
    def test_ids_must_be_contiguous(self):
        spec = FeatureSpec(id=1, name="a", kind="binary", monotone=0, suggestible=False)
        with pytest.raises(SchemaError):
            FeatureSchema([spec])

    def test_duplicate_names_rejected(self):
        specs = [
            FeatureSpec(id=0, name="a", kind="binary", monotone=0, suggestible=False),
            FeatureSpec(id=1, name="a", kind="binary", monotone=0, suggestible=False),
        ]
        with pytest.raises(SchemaError):
            FeatureSchema(specs)

    def test_lookup_helpers(self):
        schema = two_feature_schema()
        assert schema.index("balcony") == 0
        assert "size_m2" in schema and "pool" not in schema
        assert schema.names == ("balcony", "size_m2")
        assert schema.binary_ids() == [0]
        assert schema.numeric_ids() == [1]
        assert schema.monotone_vector() == [1, 1]
        assert schema.suggestible_ids() == [0]

    def test_json_round_trip(self, tmp_path):
        schema = make_schema(n_binary=3, n_numeric=2)
        assert FeatureSchema.from_json_obj(schema.to_json_obj()) == schema
        path = tmp_path / "schema.json"
        schema.save(path)
        assert FeatureSchema.load(path) == schema
        # ids come from position, not from the file
        entries = json.loads(path.read_text())
        assert all("id" not in e for e in entries)

    @pytest.mark.parametrize(
        "mangle",
        [
            lambda e: e.__setitem__("kind", "ordinal"),
            lambda e: e.__setitem__("monotone", 2),
            lambda e: e.pop("name"),
            lambda e: e.__setitem__("suggestible", "yes"),
        ],
    )
    def test_bad_entries_rejected(self, mangle):
        obj = make_schema(2).to_json_obj()
        mangle(obj[0])
        with pytest.raises(SchemaError):
            FeatureSchema.from_json_obj(obj)

    def test_non_list_rejected(self):
        with pytest.raises(SchemaError):
            FeatureSchema.from_json_obj({"name": "a"})


class TestValidateRating:
    @pytest.mark.parametrize("value", [1, 2, 3, 4, 5])
    def test_valid(self, value):
        assert validate_rating(value) == value

    @pytest.mark.parametrize("value", [0, 6, -1, 2.5, "3", None, True])
    def test_invalid(self, value):
        with pytest.raises(SchemaError):
            validate_rating(value)


class TestFeaturesFromMapping:
    def test_missing_binary_defaults_to_zero(self):
        vec = features_from_mapping(two_feature_schema(), {"size_m2": 40.0})
        assert vec.tolist() == [0.0, 40.0]

    def test_missing_numeric_is_error(self):
        with pytest.raises(DataError, match="size_m2"):
            features_from_mapping(two_feature_schema(), {"balcony": 1})

    def test_unknown_name_is_error(self):
        with pytest.raises(DataError, match="pool"):
            features_from_mapping(two_feature_schema(), {"pool": 1, "size_m2": 40.0})

    def test_binary_must_be_0_or_1(self):
        with pytest.raises(DataError, match="balcony"):
            features_from_mapping(two_feature_schema(), {"balcony": 2, "size_m2": 40.0})

    @pytest.mark.parametrize("bad", [True, "1", [1], float("nan"), float("inf")])
    def test_bad_values_rejected(self, bad):
        with pytest.raises(DataError):
            features_from_mapping(two_feature_schema(), {"balcony": 0, "size_m2": bad})


class TestLoadProperties:
    def write(self, tmp_path, lines):
        path = tmp_path / "properties.jsonl"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_spec_round_trip(self, tmp_path):
        line = '{"id":"p1","kind":"hotel","stars":4,"features":{"balcony":1,"size_m2":40.0}}'
        ds = load_properties(self.write(tmp_path, [line]), two_feature_schema())
        rec = ds.records[0]
        assert rec.features.tolist() == [1.0, 40.0]
        assert rec.official_stars == 4
        assert rec.kind == "hotel"

    def test_missing_numeric_reports_line(self, tmp_path):
        lines = [
            '{"id":"p0","kind":"vr","stars":null,"features":{"balcony":0,"size_m2":10}}',
            '{"id":"p1","kind":"hotel","stars":4,"features":{"balcony":1}}',
        ]
        with pytest.raises(DataError, match=r":2.*size_m2"):
            load_properties(self.write(tmp_path, lines), two_feature_schema())

    def test_stars_out_of_range(self, tmp_path):
        line = '{"id":"p1","kind":"hotel","stars":6,"features":{"size_m2":1}}'
        with pytest.raises(DataError):
            load_properties(self.write(tmp_path, [line]), two_feature_schema())

    def test_duplicate_id(self, tmp_path):
        line = '{"id":"p1","kind":"vr","stars":null,"features":{"size_m2":1}}'
        with pytest.raises(DataError, match="duplicate"):
            load_properties(self.write(tmp_path, [line, line]), two_feature_schema())

    def test_unknown_kind(self, tmp_path):
        line = '{"id":"p1","kind":"hostel","stars":null,"features":{"size_m2":1}}'
        with pytest.raises(DataError):
            load_properties(self.write(tmp_path, [line]), two_feature_schema())

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "properties.jsonl"
        path.write_text('\n{"id":"p1","kind":"vr","stars":null,"features":{"size_m2":2}}\n\n')
        assert len(load_properties(path, two_feature_schema()).records) == 1


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_properties_round_trip(tmp_path_factory, data):
    schema = make_schema(n_binary=2, n_numeric=1)
    n = data.draw(st.integers(1, 6))
    records = []
    for i in range(n):
        bits = data.draw(st.lists(st.integers(0, 1), min_size=2, max_size=2))
        size = data.draw(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
        )
        stars = data.draw(st.one_of(st.none(), st.integers(1, 5)))
        records.append(
            PropertyRecord(
                property_id=f"p{i}",
                kind="hotel" if stars is not None else "vacation_rental",
                official_stars=stars,
                features=np.array([float(bits[0]), float(bits[1]), size]),
            )
        )
    ds = Dataset(schema=schema, records=records)
    path = tmp_path_factory.mktemp("io") / "round.jsonl"
    write_properties(ds, path)
    back = load_properties(path, schema)
    assert [r.property_id for r in back.records] == [r.property_id for r in ds.records]
    assert [r.official_stars for r in back.records] == [r.official_stars for r in ds.records]
    assert np.array_equal(back.feature_matrix(), ds.feature_matrix())


class TestStays:
    def test_round_trip(self, tmp_path):
        stays = StayTable(guest_ids=("g1", "g2", "g1"), property_ids=("p1", "p2", "p1"))
        path = tmp_path / "stays.csv"
        write_stays(stays, path)
        back = load_stays(path)
        assert back.guest_ids == stays.guest_ids
        assert back.property_ids == stays.property_ids

    def test_header_checked(self, tmp_path):
        path = tmp_path / "stays.csv"
        path.write_text("guest,prop\ng1,p1\n")
        with pytest.raises(DataError, match="header"):
            load_stays(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "stays.csv"
        path.write_text("")
        with pytest.raises(DataError):
            load_stays(path)


class TestLabels:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "labels.jsonl"
        write_labels(path, [("v1", 4, 3.0), ("v2", 2, 7.0)])
        assert load_labels(path) == {"v1": 4, "v2": 2}
        # integral supports serialize as ints
        assert '"support": 3' in path.read_text()

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "labels.jsonl"
        path.write_text('{"id":"v1","label":3}\n{"id":"v1","label":4}\n')
        with pytest.raises(DataError, match="duplicate"):
            load_labels(path)

    def test_label_validated(self, tmp_path):
        path = tmp_path / "labels.jsonl"
        path.write_text('{"id":"v1","label":9}\n')
        with pytest.raises(DataError):
            load_labels(path)


class TestSplitDataset:
    def make(self, labels):
        schema = make_schema(n_binary=1)
        records = [
            PropertyRecord(
                property_id=f"p{i}",
                kind="vacation_rental",
                official_stars=None,
                features=np.array([0.0]),
            )
            for i in range(len(labels))
        ]
        return Dataset(schema=schema, records=records, labels=np.asarray(labels))

    def test_stratified_80_20(self):
        labels = [1] * 30 + [2] * 50 + [5] * 20
        train, val = split_dataset(self.make(labels), 0.8, seed=3)
        assert len(train.records) == 80 and len(val.records) == 20
        for cls, total in [(1, 30), (2, 50), (5, 20)]:
            train_c = int(np.sum(train.labels == cls))
            assert abs(train_c - 0.8 * total) <= 1

    def test_deterministic(self):
        ds = self.make([1, 2, 3, 4, 5] * 8)
        a1, b1 = split_dataset(ds, 0.75, seed=9)
        a2, b2 = split_dataset(ds, 0.75, seed=9)
        assert [r.property_id for r in a1.records] == [r.property_id for r in a2.records]
        assert [r.property_id for r in b1.records] == [r.property_id for r in b2.records]

    def test_disjoint_partition(self):
        ds = self.make([1, 2, 3] * 10)
        train, val = split_dataset(ds, 0.6, seed=1)
        train_ids = {r.property_id for r in train.records}
        val_ids = {r.property_id for r in val.records}
        assert not train_ids & val_ids
        assert len(train_ids | val_ids) == 30

    @pytest.mark.parametrize("frac", [0.0, 1.0, -0.1, 1.5])
    def test_fraction_must_be_interior(self, frac):
        with pytest.raises(ValueError):
            split_dataset(self.make([1, 2]), frac, seed=0)

    def test_requires_labels(self):
        ds = self.make([1, 2])
        unlabeled = Dataset(schema=ds.schema, records=ds.records)
        with pytest.raises(ValueError):
            split_dataset(unlabeled, 0.5, seed=0)
