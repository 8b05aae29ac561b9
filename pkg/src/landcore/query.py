"""Town/road datasets and the canonical spatial queries over them.

Four selection queries (area threshold, bbox window, length+date filter,
distance-to-road) plus the generalized town-road join.  Each spatial
query can run as a naive scan or through an optional bbox index; both
paths return identical rows in identical (input) order, the index only
prunes candidates before the exact geometric test.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field

from .errors import NotFoundError, ValidationError
from .geometry import (
    Box2,
    Point2,
    Polygon2,
    Polyline2,
    area,
    bbox,
    boxes_overlap,
    length,
    min_dist_polygon_polyline,
)


@dataclass(frozen=True)
class Town:
    name: str
    population: int
    region: Polygon2

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("town name must be non-empty")
        if self.population < 0:
            raise ValidationError(f"town {self.name!r}: population must be >= 0")


@dataclass(frozen=True)
class Road:
    name: str
    construct: _dt.date
    shape: Polyline2

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("road name must be non-empty")
        if not isinstance(self.construct, _dt.date):
            raise ValidationError(f"road {self.name!r}: construct must be a date")


# ---------------------------------------------------------------------------
# bbox index (static packed R-tree)

_NODE_FAN = 8


class BboxIndex:
    """Static packed R-tree over (box, payload) entries.

    Built once per dataset; search returns payloads of entries whose box
    overlaps the window, in insertion order, so index-backed queries keep
    the naive scan's row order.
    """

    def __init__(self, entries: list[tuple[Box2, object]]):
        self._entries = list(entries)
        order = sorted(
            range(len(self._entries)),
            key=lambda i: (
                (self._entries[i][0].min.x + self._entries[i][0].max.x),
                (self._entries[i][0].min.y + self._entries[i][0].max.y),
            ),
        )
        level: list[tuple[Box2, object]] = [
            (self._entries[i][0], i) for i in order
        ]
        while len(level) > 1:
            nxt = []
            for k in range(0, len(level), _NODE_FAN):
                group = level[k : k + _NODE_FAN]
                box = group[0][0]
                for b, _ in group[1:]:
                    box = _union(box, b)
                nxt.append((box, tuple(group)))
            level = nxt
        self._root = level[0] if level else None

    def search(self, window: Box2) -> list[object]:
        if self._root is None:
            return []
        hits: list[int] = []
        stack = [self._root]
        while stack:
            box, content = stack.pop()
            if not boxes_overlap(box, window):
                continue
            if isinstance(content, int):
                hits.append(content)
            else:
                stack.extend(content)
        hits.sort()
        return [self._entries[i][1] for i in hits]

    def __len__(self) -> int:
        return len(self._entries)


def _union(a: Box2, b: Box2) -> Box2:
    return Box2(
        Point2(min(a.min.x, b.min.x), min(a.min.y, b.min.y)),
        Point2(max(a.max.x, b.max.x), max(a.max.y, b.max.y)),
    )


@dataclass(frozen=True)
class Dataset:
    towns: tuple[Town, ...]
    roads: tuple[Road, ...]
    index: BboxIndex | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "towns", tuple(self.towns))
        object.__setattr__(self, "roads", tuple(self.roads))
        for kind, items in (("town", self.towns), ("road", self.roads)):
            names = [x.name for x in items]
            if len(set(names)) != len(names):
                dup = next(n for n in names if names.count(n) > 1)
                raise ValidationError(f"duplicate {kind} name {dup!r}")
        if self.index is not None and len(self.index) != len(self.towns) + len(self.roads):
            raise ValidationError("index does not cover exactly the current rows")

    def indexed(self) -> "Dataset":
        """Copy of this dataset with a bbox index over towns and roads."""
        entries: list[tuple[Box2, object]] = []
        for i, t in enumerate(self.towns):
            entries.append((bbox(t.region), ("town", i)))
        for j, r in enumerate(self.roads):
            entries.append((bbox(r.shape), ("road", j)))
        return Dataset(self.towns, self.roads, BboxIndex(entries))


def _candidate_towns(ds: Dataset, window: Box2) -> list[Town]:
    if ds.index is None:
        return list(ds.towns)
    hits = [i for kind, i in ds.index.search(window) if kind == "town"]
    return [ds.towns[i] for i in hits]


def _candidate_roads(ds: Dataset, window: Box2) -> list[Road]:
    if ds.index is None:
        return list(ds.roads)
    hits = [j for kind, j in ds.index.search(window) if kind == "road"]
    return [ds.roads[j] for j in hits]


# ---------------------------------------------------------------------------
# queries

def towns_area_gt(ds: Dataset, threshold: float) -> list[Town]:
    """Towns whose region area is strictly greater than the threshold."""
    if threshold < 0:
        raise ValidationError("area threshold must be >= 0")
    return [t for t in ds.towns if area(t.region) > threshold]


def towns_bbox_overlapping(ds: Dataset, window: Box2) -> list[Town]:
    """Towns whose region bbox overlaps the window (closed semantics)."""
    picked = _candidate_towns(ds, window)
    return [t for t in picked if boxes_overlap(bbox(t.region), window)]


def roads_short_recent(ds: Dataset, max_len: float, after: _dt.date) -> list[Road]:
    """Roads shorter than max_len built strictly after the given date."""
    if max_len < 0:
        raise ValidationError("max_len must be >= 0")
    return [r for r in ds.roads if length(r.shape) < max_len and r.construct > after]


def towns_near_road(ds: Dataset, dist: float, road_name: str) -> list[Town]:
    """Towns within dist of the named road (names compared trimmed)."""
    if dist < 0:
        raise ValidationError("dist must be >= 0")
    wanted = road_name.strip()
    road = next((r for r in ds.roads if r.name.strip() == wanted), None)
    if road is None:
        raise NotFoundError(f"unknown road {road_name!r}")
    window = bbox(road.shape).expanded(dist)
    return [
        t
        for t in _candidate_towns(ds, window)
        if min_dist_polygon_polyline(t.region, road.shape) < dist
    ]


def towns_near_any_road(ds: Dataset, dist: float) -> list[tuple[Town, Road]]:
    """All (town, road) pairs closer than dist, town-major stable order."""
    if dist < 0:
        raise ValidationError("dist must be >= 0")
    out = []
    for t in ds.towns:
        window = bbox(t.region).expanded(dist)
        for r in _candidate_roads(ds, window):
            if min_dist_polygon_polyline(t.region, r.shape) < dist:
                out.append((t, r))
    return out
