"""Tests for the JSON document format and run configuration."""

from __future__ import annotations

import datetime as dt
import json
import math
from pathlib import Path

import pytest

from landcore.document import (
    GeoDocument,
    RunConfig,
    config_from_payload,
    document_from_payload,
    document_to_payload,
    load_config,
    load_document,
    save_document,
)
from landcore.errors import DataError, ValidationError
from landcore.geometry import Box2, Point2, area
from landcore.query import towns_area_gt

DATA = Path(__file__).parent / "data"


def minimal_payload(**overrides):
    payload = {
        "schema_version": "1.0",
        "crs": "local-meters",
        "towns": [
            {
                "id": "unit",
                "properties": {"population": 10},
                "geometry": {
                    "type": "polygon",
                    "coordinates": [[[0, 0], [1, 0], [1, 1], [0, 1]]],
                },
            }
        ],
    }
    payload.update(overrides)
    return payload


class TestLoad:
    def test_minimal_document_queries(self):
        # [TRIVIAL] one unit-square town; found above threshold 0.5
        doc = document_from_payload(minimal_payload())
        assert len(doc.towns) == 1
        assert math.isclose(area(doc.towns[0].region), 1.0)
        assert towns_area_gt(doc.dataset(), 0.5) == [doc.towns[0]]

    def test_fixture_loads(self):
        doc = load_document(DATA / "townmap.json")
        assert [t.name for t in doc.towns] == ["Aweil", "Gogrial", "Wunrok", "Turalei", "Mayen"]
        assert doc.roads[0].construct == dt.date(1975, 6, 1)
        assert [a for a, _ in doc.regions] == [1, 2, 3, 4]
        assert doc.fields[1][1] is True  # the pivot flag
        assert math.isinf(doc.cost_regions[1][1])

    def test_two_vertex_polygon_names_feature(self):
        # [TRIVIAL: invariant violation]
        bad = minimal_payload()
        bad["towns"][0]["geometry"]["coordinates"] = [[[0, 0], [1, 0]]]
        with pytest.raises(ValidationError, match="town 'unit'"):
            document_from_payload(bad)

    def test_self_crossing_ring_names_feature(self):
        bad = minimal_payload()
        bad["towns"][0]["geometry"]["coordinates"] = [[[0, 0], [1, 1], [1, 0], [0, 1]]]
        with pytest.raises(ValidationError, match="town 'unit'"):
            document_from_payload(bad)

    def test_parse_error_reports_position(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{"schema_version": "1.0",\n  "towns": [}', encoding="utf-8")
        with pytest.raises(DataError, match=r"line 2 column \d+"):
            load_document(p)

    def test_unknown_schema_version(self):
        with pytest.raises(ValidationError, match="schema_version"):
            document_from_payload(minimal_payload(schema_version="9.9"))
        with pytest.raises(ValidationError, match="schema_version"):
            document_from_payload({"towns": []})

    def test_wrong_crs(self):
        with pytest.raises(ValidationError, match="crs"):
            document_from_payload(minimal_payload(crs="epsg:4326"))

    def test_nonfinite_coordinate_rejected(self):
        bad = minimal_payload()
        bad["towns"][0]["geometry"]["coordinates"][0][0] = [float("nan"), 0]
        with pytest.raises(ValidationError, match="town 'unit'"):
            document_from_payload(bad)
        # JSON's bare Infinity literal must not sneak through either
        text = json.dumps(minimal_payload()).replace("[0, 0]", "[Infinity, 0]")
        with pytest.raises(ValidationError, match="finite"):
            document_from_payload(json.loads(text))

    def test_bad_population(self):
        bad = minimal_payload()
        bad["towns"][0]["properties"]["population"] = 10.5
        with pytest.raises(ValidationError, match="population"):
            document_from_payload(bad)
        bad["towns"][0]["properties"]["population"] = True
        with pytest.raises(ValidationError, match="population"):
            document_from_payload(bad)

    def test_bad_road_date(self):
        bad = minimal_payload(
            towns=[],
            roads=[
                {
                    "id": "R1",
                    "properties": {"construct": "not-a-date"},
                    "geometry": {"type": "polyline", "coordinates": [[0, 0], [1, 0]]},
                }
            ],
        )
        with pytest.raises(ValidationError, match="road 'R1'"):
            document_from_payload(bad)

    def test_region_id_must_be_positive_int(self):
        geom = {"type": "polygon", "coordinates": [[[0, 0], [1, 0], [1, 1], [0, 1]]]}
        for bad_id in ("r1", 0, -2, True):
            bad = minimal_payload(towns=[], regions=[{"id": bad_id, "geometry": geom}])
            with pytest.raises(ValidationError, match="positive integer"):
                document_from_payload(bad)

    def test_cost_weight_parsing(self):
        geom = {"type": "polygon", "coordinates": [[[0, 0], [1, 0], [1, 1], [0, 1]]]}
        ok = minimal_payload(
            towns=[],
            cost_regions=[
                {"id": 0, "properties": {"weight": "INF"}, "geometry": geom},
            ],
        )
        assert math.isinf(document_from_payload(ok).cost_regions[0][1])
        for bad_w in (0, -1.5, "huge", None, True):
            bad = minimal_payload(
                towns=[],
                cost_regions=[{"id": 0, "properties": {"weight": bad_w}, "geometry": geom}],
            )
            with pytest.raises(ValidationError, match="cost_region 0"):
                document_from_payload(bad)

    def test_unknown_geometry_type(self):
        bad = minimal_payload()
        bad["towns"][0]["geometry"] = {"type": "circle", "coordinates": [0, 0]}
        with pytest.raises(ValidationError, match="town 'unit'"):
            document_from_payload(bad)

    def test_geometry_kind_mismatch(self):
        bad = minimal_payload()
        bad["towns"][0]["geometry"] = {"type": "polyline", "coordinates": [[0, 0], [1, 0]]}
        with pytest.raises(ValidationError, match="expected polygon"):
            document_from_payload(bad)

    def test_feature_without_id(self):
        bad = minimal_payload(towns=[{"geometry": {"type": "polygon", "coordinates": []}}])
        with pytest.raises(ValidationError, match=r"towns\[0\]"):
            document_from_payload(bad)


class TestRoundTrip:
    def test_fixture_round_trip(self, tmp_path):
        doc = load_document(DATA / "townmap.json")
        out = tmp_path / "copy.json"
        save_document(doc, out)
        assert load_document(out) == doc
        # payload is also stable through a second encode
        assert document_to_payload(load_document(out)) == document_to_payload(doc)

    def test_awkward_floats_survive(self, tmp_path):
        payload = minimal_payload()
        payload["towns"][0]["geometry"]["coordinates"] = [
            [[0.1, 0.2], [123456.789012345, 1e-7], [1 / 3, 0.30000000000000004 + 0.5]]
        ]
        doc = document_from_payload(payload)
        out = tmp_path / "floats.json"
        save_document(doc, out)
        assert load_document(out) == doc

    def test_extent_union(self):
        doc = load_document(DATA / "townmap.json")
        ext = doc.geometry_extent()
        assert ext.min == Point2(0.0, 0.0)
        assert ext.max == Point2(4000.0, 3000.0)  # road D9 dominates

    def test_empty_document_has_no_extent(self):
        doc = document_from_payload({"schema_version": "1.0", "crs": "local-meters"})
        with pytest.raises(ValidationError):
            doc.geometry_extent()


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.thresholds == (0.6, 0.3)
        assert dict(cfg.priors) == {"HIGH": 0.9, "MEDIUM": 0.5, "LOW": 0.1}
        assert cfg.connectivity == 8
        assert cfg.seed is None
        assert cfg.extent_box() is None

    def test_fixture_config(self):
        cfg = load_config(DATA / "townmap_config.json")
        assert cfg.extent_box() == Box2(Point2(0, 0), Point2(800, 400))
        assert cfg.block_size == 100
        assert cfg.seed == 7
        assert cfg.series == ((1995, 61000.0), (1997, 59000.0))

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError, match="cellsize"):
            config_from_payload({"cellsize": 2})

    def test_priors_merge_partial(self):
        cfg = config_from_payload({"priors": {"HIGH": 0.7}})
        assert dict(cfg.priors) == {"HIGH": 0.7, "MEDIUM": 0.5, "LOW": 0.1}

    def test_range_validation(self):
        for bad in (
            {"thresholds": [0.3, 0.6]},
            {"connectivity": 5},
            {"cell_size": 0},
            {"steiner_m": 0},
            {"population": -1},
            {"total_samples": 0},
            {"block_size": -2},
            {"extent": [0, 0, 0, 10]},
            {"priors": {"HIGH": 2.0}},
        ):
            with pytest.raises(ValidationError):
                config_from_payload(bad)

    def test_config_parse_error(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text("{seed: 1}", encoding="utf-8")
        with pytest.raises(DataError, match="parse error"):
            load_config(p)
