"""Topological storage for planar partitions.

A partition of the plane into areas is stored as deduplicated boundary
edges plus per-area reference lists, so a boundary shared by two areas
is kept once.  Each edge carries two boxes: ``bbox`` (tight box of its
own polyline) and ``abox`` (the union of its bbox with the bboxes of
the areas on either side).  Windowed retrieval selects edges by abox;
selecting by bbox alone can miss edges of an area that merely pokes
into the window, leaving its polygon impossible to rebuild.

Input polygons must form a clean planar partition: interiors pairwise
disjoint, and any shared boundary traced by an identical vertex chain
in both areas (vertex identity is decided after snapping coordinates to
the global tolerance).  Line-intersection noding of dirty input is out
of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IntegrityError, PartitionError, SnappingError, ValidationError
from .geometry import (
    Box2,
    Point2,
    Polygon2,
    Polyline2,
    Ring,
    bbox,
    bbox_of_points,
    box_union,
    boxes_overlap,
    cross,
    point_in_polygon,
    point_segment_distance,
    ring_signed_area,
)

_SNAP_DECIMALS = 9  # vertex identity grid, ~1e-9 m

_TOPOLTYPES = ("linear", "polygonal network", "hierarchy", "ind polygon to polyline")


@dataclass(frozen=True)
class Edge:
    """One stored boundary chain between up to two areas."""

    b_id: int
    line: Polyline2
    bbox: Box2
    abox: Box2
    a_id_left: int | None
    a_id_right: int | None

    def is_closed(self) -> bool:
        return self.line.vertices[0] == self.line.vertices[-1]


@dataclass(frozen=True)
class AreaRecord:
    """Signed edge references for one area.

    Positive refs traverse the stored vertex order, negative refs the
    reverse.  A 0 element marks the start of each island ring; refs
    between sentinels chain head-to-tail into a closed ring.
    """

    a_id: int
    edge_refs: tuple[int, ...]
    bbox: Box2


@dataclass(frozen=True)
class TopologyCatalog:
    """Registration row describing how areas refer to boundaries."""

    ind_relname: str = "areas"
    ind_relattr: str = "b_ids"
    topoltype: str = "ind polygon to polyline"
    ref_count: int = 0  # 0 = variable number of referenced objects
    ref_relname: str = "boundaries"
    ref_relid: str = "b_id"
    ref_relvis: str = "line"
    ref_relbbox: str = "abox"

    def __post_init__(self) -> None:
        if self.topoltype not in _TOPOLTYPES:
            raise ValidationError(f"unknown topoltype {self.topoltype!r}")


@dataclass(frozen=True)
class TopologyStore:
    edges: dict[int, Edge]
    areas: dict[int, AreaRecord]
    catalog: TopologyCatalog
    extent: Box2


def _key(p: Point2) -> tuple[float, float]:
    return (round(p.x, _SNAP_DECIMALS), round(p.y, _SNAP_DECIMALS))


def _oriented(vertices: Sequence[Point2], clockwise: bool) -> tuple[Point2, ...]:
    vs = tuple(vertices)
    if (ring_signed_area(vs) < 0) != clockwise:
        return vs[::-1]
    return vs


# ---------------------------------------------------------------------------
# build

def build_topology(
    inputs: Iterable[tuple[int, Polygon2]],
    catalog: TopologyCatalog | None = None,
    validate: bool = True,
) -> TopologyStore:
    """Decompose a planar partition into shared boundary edges.

    Every maximal chain of segments with the same (left area, right
    area) pair becomes one Edge; chains end at junction nodes where the
    adjacency changes.  A ring that meets no junction at all is stored
    as a single closed edge.
    """
    items = list(inputs)
    if not items:
        raise ValidationError("empty partition")
    seen_ids = set()
    for a_id, _ in items:
        if a_id <= 0:
            raise ValidationError(f"area id must be positive, got {a_id}")
        if a_id in seen_ids:
            raise ValidationError(f"duplicate area id {a_id}")
        seen_ids.add(a_id)

    # normalized rings: outer counter-clockwise, islands clockwise, so the
    # owning area is always on the left of the walk direction
    area_rings: dict[int, list[tuple[Point2, ...]]] = {}
    for a_id, poly in items:
        rings = [_oriented(poly.outer.vertices, clockwise=False)]
        rings += [_oriented(h.vertices, clockwise=True) for h in poly.islands]
        area_rings[a_id] = rings

    coords: dict[tuple[float, float], Point2] = {}
    directed_owner: dict[tuple, int] = {}
    node_segments: dict[tuple, list[tuple]] = {}
    ring_keys: dict[int, list[tuple[tuple, ...]]] = {}

    for a_id, rings in area_rings.items():
        key_rings = []
        for vs in rings:
            ks = []
            for v in vs:
                k = _key(v)
                coords.setdefault(k, v)
                ks.append(k)
            if len(set(ks)) != len(ks):
                raise SnappingError(f"area {a_id}: distinct vertices collapse under snapping")
            key_rings.append(tuple(ks))
            n = len(ks)
            for i in range(n):
                u, w = ks[i], ks[(i + 1) % n]
                if (u, w) in directed_owner:
                    raise PartitionError(
                        f"areas {directed_owner[(u, w)]} and {a_id} overlap along a segment"
                    )
                directed_owner[(u, w)] = a_id
                seg = (u, w) if u < w else (w, u)
                bucket = node_segments.setdefault(u, [])
                if seg not in bucket:
                    bucket.append(seg)
                bucket = node_segments.setdefault(w, [])
                if seg not in bucket:
                    bucket.append(seg)
        ring_keys[a_id] = key_rings

    if validate:
        _validate_partition(dict(items), area_rings, directed_owner, coords)

    def sides(seg: tuple) -> tuple[int | None, int | None]:
        u, w = seg
        return directed_owner.get((u, w)), directed_owner.get((w, u))

    junctions = {node for node in node_segments if len(node_segments[node]) != 2}
    for node, segs in node_segments.items():
        if node in junctions:
            continue
        if set(sides(segs[0])) != set(sides(segs[1])):
            junctions.add(node)

    # walk chains deterministically in input order
    step_edge: dict[tuple, tuple[int, int]] = {}  # directed step -> (b_id, sign)
    edges: dict[int, Edge] = {}
    visited: set[tuple] = set()
    next_b_id = 1
    chains: list[list[tuple]] = []

    def canonical_seg(u, w):
        return (u, w) if u < w else (w, u)

    for a_id, _ in items:
        for ks in ring_keys[a_id]:
            n = len(ks)
            for i in range(n):
                u, w = ks[i], ks[(i + 1) % n]
                seg = canonical_seg(u, w)
                if seg in visited:
                    continue
                chain = _walk_chain(u, w, junctions, node_segments, canonical_seg, visited)
                chains.append(chain)

    for chain in chains:
        b_id = next_b_id
        next_b_id += 1
        pts = [coords[k] for k in chain]
        line = Polyline2(pts)
        first = (chain[0], chain[1])
        left = directed_owner.get(first)
        right = directed_owner.get((first[1], first[0]))
        tight = bbox_of_points(pts)
        edges[b_id] = Edge(b_id, line, tight, tight, left, right)
        for i in range(len(chain) - 1):
            step_edge[(chain[i], chain[i + 1])] = (b_id, 1)
            step_edge[(chain[i + 1], chain[i])] = (b_id, -1)

    # area records
    areas: dict[int, AreaRecord] = {}
    for a_id, poly in items:
        refs: list[int] = []
        for ring_index, ks in enumerate(ring_keys[a_id]):
            if ring_index > 0:
                refs.append(0)
            refs.extend(_ring_refs(ks, step_edge))
        areas[a_id] = AreaRecord(a_id, tuple(refs), bbox(poly))

    # abox = edge bbox + adjacent area bboxes
    for b_id, e in list(edges.items()):
        abox = e.bbox
        for side in (e.a_id_left, e.a_id_right):
            if side is not None:
                abox = box_union(abox, areas[side].bbox)
        edges[b_id] = Edge(e.b_id, e.line, e.bbox, abox, e.a_id_left, e.a_id_right)

    extent = areas[items[0][0]].bbox
    for rec in areas.values():
        extent = box_union(extent, rec.bbox)

    store = TopologyStore(edges, areas, catalog or TopologyCatalog(), extent)
    _check_store(store)
    return store


def _walk_chain(u, w, junctions, node_segments, canonical_seg, visited) -> list[tuple]:
    """Extend the segment (u, w) to a maximal chain between junctions."""

    def extend(start, nxt):
        path = [start, nxt]
        while nxt not in junctions:
            segs = node_segments[nxt]
            prev_seg = canonical_seg(path[-2], nxt)
            other = segs[0] if segs[1] == prev_seg else segs[1]
            following = other[0] if other[1] == nxt else other[1]
            path.append(following)
            if following == path[0] and path[0] not in junctions:
                return path, True  # junction-free closed loop
            nxt = following
        return path, False

    if u in junctions:
        path, closed = extend(u, w)
    elif w in junctions:
        path, closed = extend(w, u)
        path.reverse()
    else:
        path, closed = extend(u, w)
        if not closed:
            back, _ = extend(w, u)
            path = back[::-1] + path[2:]
    for i in range(len(path) - 1):
        visited.add(canonical_seg(path[i], path[i + 1]))
    return path


def _ring_refs(ks: tuple, step_edge: dict) -> list[int]:
    n = len(ks)
    ids = [step_edge[(ks[i], ks[(i + 1) % n])] for i in range(n)]
    first_change = None
    for i in range(n):
        if ids[i][0] != ids[i - 1][0]:
            first_change = i
            break
    if first_change is None:
        b_id, sign = ids[0]
        return [sign * b_id]
    ordered = ids[first_change:] + ids[:first_change]
    refs = []
    for b_id, sign in ordered:
        signed = sign * b_id
        if not refs or abs(refs[-1]) != b_id:
            refs.append(signed)
    return refs


# ---------------------------------------------------------------------------
# partition validation

def _validate_partition(polygons, area_rings, directed_owner, coords) -> None:
    """Geometric screen for overlaps and mismatched shared chains."""
    segments = []  # (a_id, key_u, key_w, point_u, point_w)
    for a_id, rings in area_rings.items():
        for vs in rings:
            n = len(vs)
            for i in range(n):
                a, b = vs[i], vs[(i + 1) % n]
                segments.append((a_id, _key(a), _key(b), a, b))
    lengths = sorted(
        max(abs(pb.x - pa.x), abs(pb.y - pa.y)) for _, _, _, pa, pb in segments
    )
    cell = max(lengths[len(lengths) // 2], 1e-6)

    grid: dict[tuple[int, int], list[int]] = {}
    for idx, (_, _, _, pa, pb) in enumerate(segments):
        for cx in range(int(min(pa.x, pb.x) // cell), int(max(pa.x, pb.x) // cell) + 1):
            for cy in range(int(min(pa.y, pb.y) // cell), int(max(pa.y, pb.y) // cell) + 1):
                grid.setdefault((cx, cy), []).append(idx)

    # nodes lying in the middle of someone else's segment = chains that do
    # not share identical vertices (the T-junction failure)
    for node_key, node_pt in coords.items():
        cx, cy = int(node_pt.x // cell), int(node_pt.y // cell)
        for gx in (cx - 1, cx, cx + 1):
            for gy in (cy - 1, cy, cy + 1):
                for idx in grid.get((gx, gy), ()):
                    _, ku, kw, pa, pb = segments[idx]
                    if node_key == ku or node_key == kw:
                        continue
                    if point_segment_distance(node_pt, pa, pb) <= 10 ** -_SNAP_DECIMALS:
                        raise SnappingError(
                            f"vertex {node_pt} splits a neighbor boundary; shared "
                            "chains must use identical vertices"
                        )

    # proper segment crossings between different areas = interior overlap
    checked = set()
    for bucket in grid.values():
        for i in range(len(bucket)):
            for j in range(i + 1, len(bucket)):
                ia, ib = bucket[i], bucket[j]
                if (ia, ib) in checked:
                    continue
                checked.add((ia, ib))
                a_id1, ku1, kw1, p1, p2 = segments[ia]
                a_id2, ku2, kw2, q1, q2 = segments[ib]
                if a_id1 == a_id2 or {ku1, kw1} & {ku2, kw2}:
                    continue
                d1 = cross(q1, q2, p1)
                d2 = cross(q1, q2, p2)
                d3 = cross(p1, p2, q1)
                d4 = cross(p1, p2, q2)
                if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
                    raise PartitionError(
                        f"boundaries of areas {a_id1} and {a_id2} cross; interiors overlap"
                    )

    # containment without boundary contact: a vertex of one area strictly
    # inside another (boundary hits were already rejected above)
    node_sets = {
        a_id: {_key(v) for vs in rings for v in vs} for a_id, rings in area_rings.items()
    }
    ids = list(polygons)
    for a in ids:
        box_a = bbox(polygons[a])
        for b in ids:
            if a == b or not boxes_overlap(box_a, bbox(polygons[b])):
                continue
            probe = next(
                (
                    v
                    for vs in area_rings[b]
                    for v in vs
                    if _key(v) not in node_sets[a]
                ),
                None,
            )
            if probe is not None and point_in_polygon(probe, polygons[a]):
                raise PartitionError(f"area {b} lies inside area {a}; interiors overlap")


def _check_store(store: TopologyStore) -> None:
    ref_counts: dict[int, list[int]] = {}
    for rec in store.areas.values():
        for r in rec.edge_refs:
            if r == 0:
                continue
            if abs(r) not in store.edges:
                raise IntegrityError(f"area {rec.a_id} references missing edge {abs(r)}")
            ref_counts.setdefault(abs(r), []).append(1 if r > 0 else -1)
    for b_id, e in store.edges.items():
        if e.a_id_left is None and e.a_id_right is None:
            raise IntegrityError(f"edge {b_id} has no adjacent area")
        if not _box_contains(e.abox, e.bbox):
            raise IntegrityError(f"edge {b_id} abox does not cover its bbox")
        signs = ref_counts.get(b_id, [])
        interior = e.a_id_left is not None and e.a_id_right is not None
        if interior and sorted(signs) != [-1, 1]:
            raise IntegrityError(f"interior edge {b_id} referenced {signs}, want one of each sign")
        if not interior and len(signs) != 1:
            raise IntegrityError(f"hull edge {b_id} referenced {len(signs)} times")


def _box_contains(outer: Box2, inner: Box2) -> bool:
    return (
        outer.min.x <= inner.min.x
        and outer.min.y <= inner.min.y
        and outer.max.x >= inner.max.x
        and outer.max.y >= inner.max.y
    )


# ---------------------------------------------------------------------------
# retrieval

def compute_abox(e: Edge, store: TopologyStore) -> Box2:
    """Union of the edge's own bbox with its adjacent areas' bboxes."""
    box = e.bbox
    for side in (e.a_id_left, e.a_id_right):
        if side is None:
            continue
        if side not in store.areas:
            raise IntegrityError(f"edge {e.b_id} references unknown area {side}")
        box = box_union(box, store.areas[side].bbox)
    return box


def reconstruct_polygon(a_id: int, store: TopologyStore) -> Polygon2:
    """Rebuild an area's polygon from its signed edge references."""
    if a_id not in store.areas:
        raise IntegrityError(f"unknown area {a_id}")
    return _assemble(store.areas[a_id], store.edges)


def _assemble(rec: AreaRecord, edges: dict[int, Edge]) -> Polygon2:
    chunks: list[list[int]] = [[]]
    for r in rec.edge_refs:
        if r == 0:
            chunks.append([])
        else:
            chunks[-1].append(r)
    rings = []
    for chunk in chunks:
        if not chunk:
            raise IntegrityError(f"area {rec.a_id}: empty ring chunk")
        pts: list[Point2] = []
        for ref in chunk:
            e = edges.get(abs(ref))
            if e is None:
                raise IntegrityError(f"area {rec.a_id}: edge {abs(ref)} not available")
            seq = e.line.vertices if ref > 0 else e.line.vertices[::-1]
            if not pts:
                pts.extend(seq)
            else:
                if _key(pts[-1]) != _key(seq[0]):
                    raise IntegrityError(f"area {rec.a_id}: chain breaks at edge {abs(ref)}")
                pts.extend(seq[1:])
        if _key(pts[0]) != _key(pts[-1]):
            raise IntegrityError(f"area {rec.a_id}: ring does not close")
        rings.append(_trusted_ring(pts[:-1]))
    return _trusted_polygon(rings[0], rings[1:])


def _trusted_ring(pts: Sequence[Point2]) -> Ring:
    # rebuilt from validated storage; skip the O(n^2) simplicity re-check
    ring = object.__new__(Ring)
    object.__setattr__(ring, "vertices", tuple(pts))
    return ring


def _trusted_polygon(outer: Ring, islands: Sequence[Ring]) -> Polygon2:
    poly = object.__new__(Polygon2)
    object.__setattr__(poly, "outer", outer)
    object.__setattr__(poly, "islands", tuple(islands))
    return poly


def select_edges(store: TopologyStore, window: Box2, edge_box: str = "abox") -> list[int]:
    """b_ids whose chosen box overlaps the window (closed semantics)."""
    if edge_box not in ("abox", "bbox"):
        raise ValidationError(f"edge_box must be 'abox' or 'bbox', got {edge_box!r}")
    picked = []
    for b_id, e in store.edges.items():
        box = e.abox if edge_box == "abox" else e.bbox
        if boxes_overlap(box, window):
            picked.append(b_id)
    return picked


def window_query(
    store: TopologyStore, window: Box2, edge_box: str = "abox"
) -> list[tuple[int, Polygon2]]:
    """Areas overlapping the window, rebuilt from the selected edges only.

    With the default abox selection every returned polygon is complete.
    ``edge_box='bbox'`` reproduces the classic missing-edge failure and
    raises IntegrityError when a required edge was not selected; it
    exists as a regression probe, not for production use.
    """
    available = {b_id: store.edges[b_id] for b_id in select_edges(store, window, edge_box)}
    out = []
    for a_id in sorted(store.areas):
        rec = store.areas[a_id]
        if boxes_overlap(rec.bbox, window):
            out.append((a_id, _assemble(rec, available)))
    return out


def total_edge_vertices(store: TopologyStore) -> int:
    """Stored vertex count across all edges (redundancy metric)."""
    return sum(len(e.line.vertices) for e in store.edges.values())


def total_input_vertices(inputs: Iterable[tuple[int, Polygon2]]) -> int:
    return sum(
        len(ring.vertices) for _, poly in inputs for ring in poly.rings()
    )
