"""Planar geometric primitives and the spatial operators built on them.

Coordinates are local meters on a flat plane.  All types are immutable
value objects; every operation is a pure function, safe to call
concurrently.  Predicates use plain floating arithmetic with a global
snapping tolerance ``SNAP_EPS`` for vertex identity; exact rational
arithmetic is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import ValidationError

#: Vertex identity / boundary contact tolerance, meters.
SNAP_EPS = 1e-9


@dataclass(frozen=True, slots=True)
class Point2:
    """A point in the local meter plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, slots=True)
class Box2:
    """Closed axis-aligned box given by its min and max corners."""

    min: Point2
    max: Point2

    def __post_init__(self) -> None:
        if self.min.x > self.max.x or self.min.y > self.max.y:
            raise ValidationError(f"box min corner must not exceed max corner: {self}")

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y

    def area(self) -> float:
        return self.width * self.height

    def contains_point(self, p: Point2) -> bool:
        return self.min.x <= p.x <= self.max.x and self.min.y <= p.y <= self.max.y

    def expanded(self, margin: float) -> "Box2":
        return Box2(
            Point2(self.min.x - margin, self.min.y - margin),
            Point2(self.max.x + margin, self.max.y + margin),
        )


@dataclass(frozen=True)
class Polyline2:
    """Open chain of at least two vertices; consecutive vertices distinct."""

    vertices: tuple[Point2, ...]

    def __init__(self, vertices: Iterable[Point2]):
        vs = tuple(vertices)
        if len(vs) < 2:
            raise ValidationError(f"polyline needs at least 2 vertices, got {len(vs)}")
        for a, b in zip(vs, vs[1:]):
            if abs(a.x - b.x) <= SNAP_EPS and abs(a.y - b.y) <= SNAP_EPS:
                raise ValidationError(f"polyline has consecutive duplicate vertex at {a}")
        object.__setattr__(self, "vertices", vs)

    def segments(self) -> Iterable[tuple[Point2, Point2]]:
        return zip(self.vertices, self.vertices[1:])


@dataclass(frozen=True)
class Ring:
    """Simple closed ring; stored without repeating the first vertex."""

    vertices: tuple[Point2, ...]

    def __init__(self, vertices: Iterable[Point2]):
        vs = tuple(vertices)
        if len(vs) >= 2 and _close(vs[0], vs[-1]):
            vs = vs[:-1]  # accept explicitly closed input
        if len(vs) < 3:
            raise ValidationError(f"ring needs at least 3 distinct vertices, got {len(vs)}")
        for a, b in zip(vs, vs[1:] + vs[:1]):
            if _close(a, b):
                raise ValidationError(f"ring has consecutive duplicate vertex at {a}")
        if abs(ring_signed_area(vs)) <= SNAP_EPS:
            raise ValidationError("ring is degenerate (zero area)")
        if _ring_self_intersects(vs):
            raise ValidationError("ring is not simple (self-intersection)")
        object.__setattr__(self, "vertices", vs)

    def segments(self) -> list[tuple[Point2, Point2]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def signed_area(self) -> float:
        return ring_signed_area(self.vertices)


@dataclass(frozen=True)
class Polygon2:
    """Region bounded by an outer ring, minus island (hole) rings."""

    outer: Ring
    islands: tuple[Ring, ...] = field(default=())

    def __init__(self, outer: Ring, islands: Iterable[Ring] = ()):
        isl = tuple(islands)
        for hole in isl:
            for v in hole.vertices:
                if not _point_in_ring(v, outer.vertices, include_boundary=False):
                    raise ValidationError("island vertex lies outside the outer ring")
        for i in range(len(isl)):
            for j in range(i + 1, len(isl)):
                if _rings_interiors_overlap(isl[i], isl[j]):
                    raise ValidationError("island interiors overlap")
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "islands", isl)

    def rings(self) -> tuple[Ring, ...]:
        return (self.outer,) + self.islands


Geometry = Union[Polygon2, Polyline2]


# ---------------------------------------------------------------------------
# scalar helpers

def _close(a: Point2, b: Point2) -> bool:
    return abs(a.x - b.x) <= SNAP_EPS and abs(a.y - b.y) <= SNAP_EPS


def ring_signed_area(vertices: Sequence[Point2]) -> float:
    """Shoelace signed area; positive for counter-clockwise order."""
    acc = 0.0
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        acc += a.x * b.y - b.x * a.y
    return 0.5 * acc


def cross(o: Point2, a: Point2, b: Point2) -> float:
    """Cross product of OA x OB; sign gives turn direction at O."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def point_segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    ax, ay = a.x, a.y
    dx, dy = b.x - ax, b.y - ay
    px, py = p.x - ax, p.y - ay
    denom = dx * dx + dy * dy
    if denom <= 0.0:
        return math.hypot(px, py)
    t = (px * dx + py * dy) / denom
    if t <= 0.0:
        return math.hypot(px, py)
    if t >= 1.0:
        return math.hypot(p.x - b.x, p.y - b.y)
    return math.hypot(px - t * dx, py - t * dy)


def segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool:
    """True when the closed segments share at least one point."""
    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    # collinear / endpoint contact
    return (
        (d1 == 0 and _on_segment(q1, q2, p1))
        or (d2 == 0 and _on_segment(q1, q2, p2))
        or (d3 == 0 and _on_segment(p1, p2, q1))
        or (d4 == 0 and _on_segment(p1, p2, q2))
    )


def _on_segment(a: Point2, b: Point2, p: Point2) -> bool:
    # p assumed collinear with a-b
    return (
        min(a.x, b.x) - SNAP_EPS <= p.x <= max(a.x, b.x) + SNAP_EPS
        and min(a.y, b.y) - SNAP_EPS <= p.y <= max(a.y, b.y) + SNAP_EPS
    )


def segment_segment_distance(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> float:
    if segments_intersect(p1, p2, q1, q2):
        return 0.0
    return min(
        point_segment_distance(p1, q1, q2),
        point_segment_distance(p2, q1, q2),
        point_segment_distance(q1, p1, p2),
        point_segment_distance(q2, p1, p2),
    )


def _ring_self_intersects(vs: Sequence[Point2]) -> bool:
    n = len(vs)
    for i in range(n):
        a1, a2 = vs[i], vs[(i + 1) % n]
        for j in range(i + 1, n):
            # skip segments adjacent to segment i (shared endpoint is legal)
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            b1, b2 = vs[j], vs[(j + 1) % n]
            if segments_intersect(a1, a2, b1, b2):
                return True
    return False


def _point_in_ring(p: Point2, vs: Sequence[Point2], include_boundary: bool) -> bool:
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if point_segment_distance(p, a, b) <= SNAP_EPS:
            return include_boundary
    return _crossing_count_odd(p, vs)


def _crossing_count_odd(p: Point2, vs: Sequence[Point2]) -> bool:
    # ray cast to +x; reliable for points not on the boundary
    inside = False
    n = len(vs)
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_cross:
                inside = not inside
    return inside


def _rings_interiors_overlap(r1: Ring, r2: Ring) -> bool:
    for a, b in r1.segments():
        for c, d in r2.segments():
            if segments_intersect(a, b, c, d):
                return True
    if _point_in_ring(r1.vertices[0], r2.vertices, include_boundary=False):
        return True
    if _point_in_ring(r2.vertices[0], r1.vertices, include_boundary=False):
        return True
    return False


# ---------------------------------------------------------------------------
# spatial operators

def area(p: Polygon2) -> float:
    """Area of the region: outer ring area minus the island areas."""
    total = abs(ring_signed_area(p.outer.vertices))
    for hole in p.islands:
        total -= abs(ring_signed_area(hole.vertices))
    if total <= 0.0:
        raise ValidationError("polygon area is not positive; islands exceed outer ring")
    return total


def length(l: Polyline2) -> float:
    """Sum of Euclidean segment lengths."""
    return sum(math.hypot(b.x - a.x, b.y - a.y) for a, b in l.segments())


def bbox(g: Geometry) -> Box2:
    """Tight axis-aligned bounding box over all vertices."""
    if isinstance(g, Polygon2):
        pts = [v for ring in g.rings() for v in ring.vertices]
    else:
        pts = list(g.vertices)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return Box2(Point2(min(xs), min(ys)), Point2(max(xs), max(ys)))


def bbox_of_points(pts: Iterable[Point2]) -> Box2:
    pts = list(pts)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return Box2(Point2(min(xs), min(ys)), Point2(max(xs), max(ys)))


def box_union(a: Box2, b: Box2) -> Box2:
    return Box2(
        Point2(min(a.min.x, b.min.x), min(a.min.y, b.min.y)),
        Point2(max(a.max.x, b.max.x), max(a.max.y, b.max.y)),
    )


def boxes_overlap(a: Box2, b: Box2) -> bool:
    """Closed-box overlap: touching edges or corners count."""
    return (
        a.min.x <= b.max.x
        and b.min.x <= a.max.x
        and a.min.y <= b.max.y
        and b.min.y <= a.max.y
    )


def point_in_polygon(q: Point2, p: Polygon2) -> bool:
    """Containment in the closed region; boundary points count as inside."""
    for ring in p.rings():
        vs = ring.vertices
        n = len(vs)
        for i in range(n):
            if point_segment_distance(q, vs[i], vs[(i + 1) % n]) <= SNAP_EPS:
                return True
    if not _crossing_count_odd(q, p.outer.vertices):
        return False
    for hole in p.islands:
        if _crossing_count_odd(q, hole.vertices):
            return False
    return True


def min_dist_polygon_polyline(p: Polygon2, l: Polyline2) -> float:
    """Minimum distance between the polyline and the polygon's closed region.

    Zero when the polyline touches or enters the region (island holes do
    not belong to the region).
    """
    if any(point_in_polygon(v, p) for v in l.vertices):
        return 0.0
    best = math.inf
    boundary = [seg for ring in p.rings() for seg in ring.segments()]
    for a, b in l.segments():
        for c, d in boundary:
            dist = segment_segment_distance(a, b, c, d)
            if dist < best:
                best = dist
                if best == 0.0:
                    return 0.0
    return best


# ---------------------------------------------------------------------------
# rigid transforms (used by tests and demo scripts)

def translate(g, dx: float, dy: float):
    return _transform(g, lambda p: Point2(p.x + dx, p.y + dy))


def scale(g, k: float):
    if k <= 0:
        raise ValidationError("scale factor must be positive")
    return _transform(g, lambda p: Point2(p.x * k, p.y * k))


def rotate(g, angle_rad: float, center: Point2 = Point2(0.0, 0.0)):
    c, s = math.cos(angle_rad), math.sin(angle_rad)

    def rot(p: Point2) -> Point2:
        dx, dy = p.x - center.x, p.y - center.y
        return Point2(center.x + c * dx - s * dy, center.y + s * dx + c * dy)

    return _transform(g, rot)


def _transform(g, f):
    if isinstance(g, Point2):
        return f(g)
    if isinstance(g, Polyline2):
        return Polyline2(f(v) for v in g.vertices)
    if isinstance(g, Ring):
        return Ring(f(v) for v in g.vertices)
    if isinstance(g, Polygon2):
        return Polygon2(
            Ring(f(v) for v in g.outer.vertices),
            tuple(Ring(f(v) for v in hole.vertices) for hole in g.islands),
        )
    raise TypeError(f"cannot transform {type(g).__name__}")
