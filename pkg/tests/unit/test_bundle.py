"""Unit tests for ``quantikit/serialization/bundle.py`` and ``schema.py``."""
from __future__ import annotations

import pytest
import ujson as json

from quantikit.core.errors import (
    BadParameter,
    BundleSyntaxError,
    BundleValidationError,
    TypeMismatch,
    UnresolvedReference,
)
from quantikit.serialization.bundle import dump_bundle, load_bundle, parse_bundle, parse_document

pytestmark = pytest.mark.unit


class TestLoadBundle:
    def test_two_fixture_sections(self, fixtures_dir):
        bundle = load_bundle(str(fixtures_dir / "two.json"))
        assert bundle.quantaloid.name == "two"
        assert len(bundle.categories) == 5
        assert len(bundle.functors) == 10
        assert len(bundle.distributors) == 5
        assert len(bundle.transforms) == 6
        assert set(bundle.diagrams) == {"pair", "nothing", "loop"}
        assert bundle.cones["pairP"].legs["homA"].mapping == {"p": "x"}

    def test_omitted_entries_take_defaults(self, fixtures_dir):
        bundle = load_bundle(str(fixtures_dir / "two.json"))
        A = bundle.categories["A"]
        assert A.a("x", "x") == "1"
        assert A.a("y", "x") == "0"
        assert bundle.distributors["ev"].value[("p", "x")] == "0"

    def test_diagonal_quantaloid_with_extents(self, fixtures_dir):
        bundle = load_bundle(str(fixtures_dir / "pmet.json"))
        assert bundle.diagonal is not None
        assert bundle.categories["PM"].extent == {"p": "1", "q": "2", "r": "0"}

    def test_chain_fixture(self, fixtures_dir):
        bundle = load_bundle(str(fixtures_dir / "chain3.json"))
        assert bundle.quantaloid.name == "chain:3"

    def test_missing_file_is_a_usage_error(self, tmp_path):
        with pytest.raises(BadParameter) as excinfo:
            load_bundle(str(tmp_path / "missing.json"))
        assert excinfo.value.exit_code == 2


class TestBundleErrors:
    def test_unresolved_reference(self, fixtures_dir):
        with pytest.raises(UnresolvedReference) as excinfo:
            load_bundle(str(fixtures_dir / "bad_reference.json"))
        assert excinfo.value.witness["path"] == "/functors/f/to"
        assert excinfo.value.exit_code == 2

    def test_value_outside_the_hom_lattice(self, fixtures_dir):
        with pytest.raises(BundleValidationError) as excinfo:
            load_bundle(str(fixtures_dir / "bad_value.json"))
        assert excinfo.value.path == "/categories/A"
        assert isinstance(excinfo.value.cause, TypeMismatch)
        assert excinfo.value.exit_code == 1

    def test_invalid_json(self):
        with pytest.raises(BundleSyntaxError):
            parse_bundle("{")

    def test_top_level_must_be_an_object(self):
        with pytest.raises(BundleSyntaxError):
            parse_bundle("[1]")

    def test_schema_rejects_unknown_builtin(self):
        with pytest.raises(BundleSyntaxError) as excinfo:
            parse_bundle('{"quantaloid": {"builtin": "reals"}}')
        assert excinfo.value.witness["path"] == "/quantaloid"

    def test_schema_rejects_unknown_section(self):
        with pytest.raises(BundleSyntaxError):
            parse_bundle('{"quantaloid": {"builtin": "two"}, "metrics": {}}')

    def test_chain_without_size(self):
        with pytest.raises(BadParameter):
            parse_bundle('{"quantaloid": {"builtin": "chain"}}')

    def test_unmapped_object(self):
        text = json.dumps({
            "quantaloid": {"builtin": "two"},
            "categories": {"A": {"objects": ["x", "y"]}},
            "functors": {"f": {"from": "A", "to": "A", "map": {"x": "x"}}},
        })
        with pytest.raises(BundleValidationError) as excinfo:
            parse_bundle(text)
        assert excinfo.value.path == "/functors/f"

    def test_invalid_transform_is_wrapped_with_its_path(self):
        text = json.dumps({
            "quantaloid": {"builtin": "two"},
            "categories": {"P": {"objects": ["p"]}, "A": {"objects": ["x", "y"], "hom": [["x", "y", "1"]]}},
            "functors": {"idP": {"from": "P", "to": "P", "map": {"p": "p"}},
                         "cx": {"from": "A", "to": "A", "map": {"x": "x", "y": "x"}}},
            "distributors": {"ev": {"from": "P", "to": "A", "value": [["p", "y", "1"]]}},
            "transforms": {"bad": {"from": "ev", "to": "ev", "fwd": "idP", "bwd": "cx"}},
        })
        with pytest.raises(BundleValidationError) as excinfo:
            parse_bundle(text)
        assert excinfo.value.path == "/transforms/bad"
        assert excinfo.value.witness["cause"]["error"] == "ChuViolation"


class TestDumpBundle:
    def test_dump_is_a_fixed_point_of_parsing(self, fixtures_dir):
        first = dump_bundle(load_bundle(str(fixtures_dir / "two.json")))
        second = dump_bundle(parse_document(first))
        assert first == second

    def test_dump_writes_full_tables(self, fixtures_dir):
        document = dump_bundle(load_bundle(str(fixtures_dir / "two.json")))
        assert len(document["categories"]["A"]["hom"]) == 4
        assert document["transforms"]["homA_c"] == {"from": "homA", "to": "homA", "fwd": "cx", "bwd": "cy"}
