"""JSON document format for geodata and run configuration.

A ``GeoDocument`` is a single JSON object carrying towns, roads,
partition regions, survey fields and cost regions in local meter
coordinates.  The format is deliberately small: explicit
``schema_version``, ``crs`` fixed to ``"local-meters"``, and one
``{id, properties, geometry}`` record per feature.  Geometry is either
``{"type": "polygon", "coordinates": [outer, island, ...]}`` or
``{"type": "polyline", "coordinates": [[x, y], ...]}``.

Documents round-trip: ``load(save(doc)) == doc`` because floats are
serialized with their shortest round-trip representation.  Infinite
cost-region weights are encoded as the string ``"INF"`` since JSON has
no infinity literal.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

from .ccm import CostMap
from .errors import DataError, ValidationError
from .geometry import Box2, Point2, Polygon2, Polyline2, Ring, bbox
from .query import Dataset, Road, Town
from .stratification import (
    DEFAULT_PRIORS,
    DEFAULT_THRESHOLDS,
    LEVELS,
    FieldMap,
)

SCHEMA_VERSIONS = ("1.0",)
CRS = "local-meters"


@dataclass(frozen=True)
class GeoDocument:
    """Validated in-memory form of the JSON geodata format."""

    towns: tuple[Town, ...] = ()
    roads: tuple[Road, ...] = ()
    regions: tuple[tuple[int, Polygon2], ...] = ()
    fields: tuple[tuple[Polygon2, bool, bool], ...] = ()
    cost_regions: tuple[tuple[Polygon2, float], ...] = ()
    schema_version: str = SCHEMA_VERSIONS[-1]
    crs: str = CRS

    def __post_init__(self) -> None:
        if self.schema_version not in SCHEMA_VERSIONS:
            raise ValidationError(
                f"unknown schema_version {self.schema_version!r}; "
                f"supported: {', '.join(SCHEMA_VERSIONS)}"
            )
        if self.crs != CRS:
            raise ValidationError(f"crs must be {CRS!r}, got {self.crs!r}")
        for tup_name in ("towns", "roads", "regions", "fields", "cost_regions"):
            object.__setattr__(
                self,
                tup_name,
                tuple(
                    tuple(v) if isinstance(v, (list, tuple)) else v
                    for v in getattr(self, tup_name)
                ),
            )

    def dataset(self) -> Dataset:
        return Dataset(self.towns, self.roads)

    def field_map(self, extent: Box2, block_size: float) -> FieldMap:
        return FieldMap(self.fields, extent, block_size)

    def cost_map(self, extent: Box2 | None = None, default_weight: float = 1.0) -> CostMap:
        if extent is None:
            extent = self.geometry_extent()
        return CostMap(self.cost_regions, extent, default_weight)

    def geometries(self):
        """Every geometry in the document, in a fixed order."""
        for t in self.towns:
            yield t.region
        for r in self.roads:
            yield r.shape
        for _, poly in self.regions:
            yield poly
        for poly, _, _ in self.fields:
            yield poly
        for poly, _ in self.cost_regions:
            yield poly

    def geometry_extent(self) -> Box2:
        boxes = [bbox(g) for g in self.geometries()]
        if not boxes:
            raise ValidationError("document has no geometry to derive an extent from")
        return Box2(
            Point2(min(b.min.x for b in boxes), min(b.min.y for b in boxes)),
            Point2(max(b.max.x for b in boxes), max(b.max.y for b in boxes)),
        )


# ---------------------------------------------------------------------------
# geometry (de)serialization

def _check_pair(pair, fid: str):
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        or not all(math.isfinite(float(v)) for v in pair)
    ):
        raise ValidationError(f"{fid}: coordinate must be a finite [x, y] pair, got {pair!r}")
    return Point2(float(pair[0]), float(pair[1]))


def decode_geometry(g, fid: str) -> Polygon2 | Polyline2:
    if not isinstance(g, dict) or "type" not in g or "coordinates" not in g:
        raise ValidationError(f"{fid}: geometry must have 'type' and 'coordinates'")
    gtype, coords = g["type"], g["coordinates"]
    try:
        if gtype == "polygon":
            if not isinstance(coords, list) or not coords:
                raise ValidationError("polygon needs at least an outer ring")
            rings = [Ring([_check_pair(p, fid) for p in ring]) for ring in coords]
            return Polygon2(rings[0], rings[1:])
        if gtype == "polyline":
            if not isinstance(coords, list):
                raise ValidationError("polyline coordinates must be a list")
            return Polyline2([_check_pair(p, fid) for p in coords])
    except ValidationError as e:
        raise ValidationError(f"{fid}: {e}") from None
    raise ValidationError(f"{fid}: unknown geometry type {gtype!r}")


def encode_geometry(g: Polygon2 | Polyline2) -> dict:
    if isinstance(g, Polygon2):
        return {
            "type": "polygon",
            "coordinates": [
                [[p.x, p.y] for p in ring.vertices]
                for ring in (g.outer, *g.islands)
            ],
        }
    return {"type": "polyline", "coordinates": [[p.x, p.y] for p in g.vertices]}


def _require_polygon(geom, fid: str) -> Polygon2:
    if not isinstance(geom, Polygon2):
        raise ValidationError(f"{fid}: expected polygon geometry")
    return geom


def _require_polyline(geom, fid: str) -> Polyline2:
    if not isinstance(geom, Polyline2):
        raise ValidationError(f"{fid}: expected polyline geometry")
    return geom


def _records(payload: dict, key: str):
    arr = payload.get(key, [])
    if not isinstance(arr, list):
        raise ValidationError(f"{key} must be an array of feature records")
    for i, rec in enumerate(arr):
        if not isinstance(rec, dict) or "id" not in rec or "geometry" not in rec:
            raise ValidationError(f"{key}[{i}]: feature needs 'id' and 'geometry'")
        props = rec.get("properties", {})
        if not isinstance(props, dict):
            raise ValidationError(f"{key} {rec['id']!r}: properties must be an object")
        yield rec["id"], props, rec["geometry"]


# ---------------------------------------------------------------------------
# document load / save

def document_from_payload(payload) -> GeoDocument:
    if not isinstance(payload, dict):
        raise ValidationError("document root must be a JSON object")
    version = payload.get("schema_version")
    if version not in SCHEMA_VERSIONS:
        raise ValidationError(
            f"unknown schema_version {version!r}; supported: {', '.join(SCHEMA_VERSIONS)}"
        )

    towns = []
    for fid, props, geom in _records(payload, "towns"):
        label = f"town {fid!r}"
        population = props.get("population", 0)
        if not isinstance(population, int) or isinstance(population, bool):
            raise ValidationError(f"{label}: population must be an integer")
        try:
            towns.append(
                Town(str(fid), population, _require_polygon(decode_geometry(geom, label), label))
            )
        except ValidationError as e:
            raise ValidationError(f"{label}: {e}" if label not in str(e) else str(e)) from None

    roads = []
    for fid, props, geom in _records(payload, "roads"):
        label = f"road {fid!r}"
        raw = props.get("construct")
        try:
            construct = _dt.date.fromisoformat(raw)
        except (TypeError, ValueError):
            raise ValidationError(
                f"{label}: construct must be an ISO date string, got {raw!r}"
            ) from None
        try:
            roads.append(
                Road(str(fid), construct, _require_polyline(decode_geometry(geom, label), label))
            )
        except ValidationError as e:
            raise ValidationError(f"{label}: {e}" if label not in str(e) else str(e)) from None

    regions = []
    for fid, _, geom in _records(payload, "regions"):
        label = f"region {fid!r}"
        if not isinstance(fid, int) or isinstance(fid, bool) or fid <= 0:
            raise ValidationError(f"{label}: region id must be a positive integer")
        regions.append((fid, _require_polygon(decode_geometry(geom, label), label)))

    fields_ = []
    for fid, props, geom in _records(payload, "fields"):
        label = f"field {fid!r}"
        pivot = props.get("pivot", False)
        small = props.get("small", False)
        if not isinstance(pivot, bool) or not isinstance(small, bool):
            raise ValidationError(f"{label}: pivot and small must be booleans")
        fields_.append((_require_polygon(decode_geometry(geom, label), label), pivot, small))

    cost_regions = []
    for fid, props, geom in _records(payload, "cost_regions"):
        label = f"cost_region {fid!r}"
        w = props.get("weight")
        if w == "INF":
            weight = math.inf
        elif isinstance(w, (int, float)) and not isinstance(w, bool) and math.isfinite(w) and w > 0:
            weight = float(w)
        else:
            raise ValidationError(f"{label}: weight must be a positive number or \"INF\"")
        cost_regions.append((_require_polygon(decode_geometry(geom, label), label), weight))

    return GeoDocument(
        tuple(towns),
        tuple(roads),
        tuple(regions),
        tuple(fields_),
        tuple(cost_regions),
        schema_version=version,
        crs=payload.get("crs", ""),
    )


def document_to_payload(doc: GeoDocument) -> dict:
    return {
        "schema_version": doc.schema_version,
        "crs": doc.crs,
        "towns": [
            {
                "id": t.name,
                "properties": {"population": t.population},
                "geometry": encode_geometry(t.region),
            }
            for t in doc.towns
        ],
        "roads": [
            {
                "id": r.name,
                "properties": {"construct": r.construct.isoformat()},
                "geometry": encode_geometry(r.shape),
            }
            for r in doc.roads
        ],
        "regions": [
            {"id": a_id, "properties": {}, "geometry": encode_geometry(poly)}
            for a_id, poly in doc.regions
        ],
        "fields": [
            {
                "id": i,
                "properties": {"pivot": pivot, "small": small},
                "geometry": encode_geometry(poly),
            }
            for i, (poly, pivot, small) in enumerate(doc.fields)
        ],
        "cost_regions": [
            {
                "id": i,
                "properties": {"weight": "INF" if math.isinf(w) else w},
                "geometry": encode_geometry(poly),
            }
            for i, (poly, w) in enumerate(doc.cost_regions)
        ],
    }


def load_document(path) -> GeoDocument:
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"parse error: {path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return document_from_payload(payload)


def save_document(doc: GeoDocument, path) -> None:
    Path(path).write_text(
        json.dumps(document_to_payload(doc), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# run configuration

@dataclass(frozen=True)
class RunConfig:
    """Knobs for the CLI, loaded from a JSON file.

    ``seed`` left unset falls back to the LANDCORE_SEED environment
    variable, then 0.  ``extent`` left unset is derived from the data.
    """

    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS
    priors: tuple[tuple[str, float], ...] = tuple(sorted(DEFAULT_PRIORS.items()))
    connectivity: int = 8
    cell_size: float = 1.0
    steiner_m: int = 2
    population: float = 0.0
    per_capita_demand: float = 0.0
    crop_yield: float = 0.0
    seed: int | None = None
    block_size: float = 100.0
    total_samples: int = 100
    extent: tuple[float, float, float, float] | None = None
    year: int = 0
    series: tuple[tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        hi, med = self.thresholds
        if not 0 < med < hi <= 1:
            raise ValidationError("thresholds must satisfy 0 < medium < high <= 1")
        if dict(self.priors).keys() != set(LEVELS) or not all(
            0 < p <= 1 for _, p in self.priors
        ):
            raise ValidationError("priors must map HIGH/MEDIUM/LOW to values in (0, 1]")
        if self.connectivity not in (4, 8, 16):
            raise ValidationError("connectivity must be 4, 8 or 16")
        if not self.cell_size > 0:
            raise ValidationError("cell_size must be > 0")
        if self.steiner_m < 1:
            raise ValidationError("steiner_m must be >= 1")
        for name in ("population", "per_capita_demand", "crop_yield"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if not self.block_size > 0:
            raise ValidationError("block_size must be > 0")
        if self.total_samples < 1:
            raise ValidationError("total_samples must be >= 1")
        if self.extent is not None:
            x0, y0, x1, y1 = self.extent
            if not (x1 > x0 and y1 > y0):
                raise ValidationError("extent must be [x0, y0, x1, y1] with positive area")

    def priors_dict(self) -> dict[str, float]:
        return dict(self.priors)

    def extent_box(self) -> Box2 | None:
        if self.extent is None:
            return None
        x0, y0, x1, y1 = self.extent
        return Box2(Point2(x0, y0), Point2(x1, y1))


def config_from_payload(payload) -> RunConfig:
    if not isinstance(payload, dict):
        raise ValidationError("config root must be a JSON object")
    known = {f.name for f in dc_fields(RunConfig)}
    unknown = set(payload) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kw = dict(payload)
    if "thresholds" in kw:
        kw["thresholds"] = tuple(kw["thresholds"])
    if "priors" in kw:
        if not isinstance(kw["priors"], dict):
            raise ValidationError("priors must be an object like {\"HIGH\": 0.9, ...}")
        merged = dict(DEFAULT_PRIORS)
        merged.update(kw["priors"])
        kw["priors"] = tuple(sorted(merged.items()))
    if "extent" in kw and kw["extent"] is not None:
        kw["extent"] = tuple(float(v) for v in kw["extent"])
    if "series" in kw:
        kw["series"] = tuple((int(y), float(a)) for y, a in kw["series"])
    try:
        return RunConfig(**kw)
    except TypeError as e:
        raise ValidationError(f"bad config value: {e}") from None


def load_config(path) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"parse error: {path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return config_from_payload(payload)
