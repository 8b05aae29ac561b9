"""Cross-country movement: least-cost paths over weighted regions.

Two solvers over the same cost model (cost per meter is uniform inside
each region):

* raster — rasterize the map onto a grid and run Dijkstra with 4-, 8-,
  or 16-way moves, a move costing center distance times the mean of the
  two cell weights;
* vector — constrained Delaunay triangulation of the region boundaries,
  then Dijkstra over triangle corners plus m nested dyadic Steiner
  points per triangulation edge, arcs living inside single triangles.

Both overestimate the continuous optimum and converge toward it as the
grid refines / m grows.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

from .cdt import Triangulation, constrained_delaunay
from .errors import ValidationError
from .geometry import (
    Box2,
    Point2,
    Polygon2,
    bbox,
    boxes_overlap,
    point_in_polygon,
    point_segment_distance,
)

INFINITE = math.inf

_CONNECTIVITIES = {
    4: ((0, 1), (0, -1), (1, 0), (-1, 0)),
    8: (
        (0, 1), (0, -1), (1, 0), (-1, 0),
        (1, 1), (1, -1), (-1, 1), (-1, -1),
    ),
    16: (
        (0, 1), (0, -1), (1, 0), (-1, 0),
        (1, 1), (1, -1), (-1, 1), (-1, -1),
        (1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1),
    ),
}


@dataclass(frozen=True)
class CostMap:
    """Weighted planar subdivision plus a default weight for gaps."""

    regions: tuple[tuple[Polygon2, float], ...]
    extent: Box2
    default_weight: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "regions", tuple(tuple(r) for r in self.regions))
        for i, (poly, w) in enumerate(self.regions):
            if not isinstance(poly, Polygon2):
                raise ValidationError(f"region {i}: not a polygon")
            if not (w > 0):  # rejects 0, negatives and NaN; allows inf
                raise ValidationError(f"region {i}: weight must be > 0 or INFINITE")
        if not (self.default_weight > 0):
            raise ValidationError("default_weight must be > 0 or INFINITE")
        _check_disjoint_interiors(self.regions)

    def weight_at(self, p: Point2) -> float:
        """Weight of the first region containing p, else the default."""
        for poly, w in self.regions:
            if point_in_polygon(p, poly):
                return w
        return self.default_weight


def _check_disjoint_interiors(regions) -> None:
    polys = [poly for poly, _ in regions]
    boxes = [bbox(p) for p in polys]
    segs = [
        [(ring.vertices[i - 1], ring.vertices[i])
         for ring in p.rings() for i in range(len(ring.vertices))]
        for p in polys
    ]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if not boxes_overlap(boxes[i], boxes[j]):
                continue
            for a, b in segs[i]:
                for u, v in segs[j]:
                    d1 = _cross3(u, v, a)
                    d2 = _cross3(u, v, b)
                    d3 = _cross3(a, b, u)
                    d4 = _cross3(a, b, v)
                    if (
                        0.0 not in (d1, d2, d3, d4)
                        and (d1 > 0) != (d2 > 0)
                        and (d3 > 0) != (d4 > 0)
                    ):
                        raise ValidationError(
                            f"regions {i} and {j} overlap (boundaries cross)"
                        )
            for p, q, owner in ((i, j, polys[j]), (j, i, polys[i])):
                for ring in polys[p].rings():
                    for v in ring.vertices:
                        if point_in_polygon(v, owner) and all(
                            point_segment_distance(v, a, b) > 1e-9
                            for a, b in segs[q]
                        ):
                            raise ValidationError(
                                f"regions {i} and {j} overlap (vertex inside)"
                            )


def _cross3(o: Point2, a: Point2, b: Point2) -> float:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


@dataclass(frozen=True)
class CostGrid:
    """Row-major grid of cell weights; cell (0, 0) is the bottom-left."""

    origin: Point2
    cell_size: float
    ncols: int
    nrows: int
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.ncols < 1 or self.nrows < 1:
            raise ValidationError("grid must have at least one row and column")
        if not self.cell_size > 0:
            raise ValidationError("cell_size must be > 0")
        if len(self.weights) != self.ncols * self.nrows:
            raise ValidationError("weights length must equal ncols * nrows")

    def weight(self, row: int, col: int) -> float:
        return self.weights[row * self.ncols + col]

    def center(self, row: int, col: int) -> Point2:
        return Point2(
            self.origin.x + (col + 0.5) * self.cell_size,
            self.origin.y + (row + 0.5) * self.cell_size,
        )

    def cell_of(self, p: Point2) -> tuple[int, int]:
        """(row, col) of the cell containing p; the far edges belong to
        the last row/column."""
        col = int((p.x - self.origin.x) // self.cell_size)
        row = int((p.y - self.origin.y) // self.cell_size)
        if col == self.ncols and (p.x - self.origin.x) <= self.ncols * self.cell_size:
            col -= 1
        if row == self.nrows and (p.y - self.origin.y) <= self.nrows * self.cell_size:
            row -= 1
        if not (0 <= col < self.ncols and 0 <= row < self.nrows):
            raise ValidationError(f"point {p} lies outside the grid")
        return row, col


@dataclass(frozen=True)
class PathResult:
    """A solved path; empty vertices plus infinite cost means no path."""

    vertices: tuple[Point2, ...]
    total_cost: float
    method: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if math.isinf(self.total_cost) != (len(self.vertices) == 0):
            raise ValidationError("infinite cost and empty path must go together")
        if not math.isinf(self.total_cost) and self.total_cost < 0:
            raise ValidationError("total_cost must be >= 0")

    def found(self) -> bool:
        return bool(self.vertices)


# ---------------------------------------------------------------------------
# raster solver

def rasterize(cost_map: CostMap, cell_size: float) -> CostGrid:
    """Sample region weights at cell centers over the map extent."""
    if not cell_size > 0:
        raise ValidationError("cell_size must be > 0")
    ext = cost_map.extent
    ncols = max(1, math.ceil(ext.width / cell_size - 1e-9))
    nrows = max(1, math.ceil(ext.height / cell_size - 1e-9))
    boxes = [bbox(poly) for poly, _ in cost_map.regions]
    weights = []
    for row in range(nrows):
        cy = ext.min.y + (row + 0.5) * cell_size
        for col in range(ncols):
            c = Point2(ext.min.x + (col + 0.5) * cell_size, cy)
            w = cost_map.default_weight
            for (poly, rw), b in zip(cost_map.regions, boxes):
                if (
                    b.min.x <= c.x <= b.max.x
                    and b.min.y <= c.y <= b.max.y
                    and point_in_polygon(c, poly)
                ):
                    w = rw
                    break
            weights.append(w)
    return CostGrid(ext.min, cell_size, ncols, nrows, tuple(weights))


def raster_path(grid: CostGrid, s: Point2, t: Point2, connectivity: int = 8) -> PathResult:
    """Least-cost grid path; moves cost center distance x mean cell weight."""
    if connectivity not in _CONNECTIVITIES:
        raise ValidationError("connectivity must be 4, 8 or 16")
    moves = _CONNECTIVITIES[connectivity]
    method = f"RASTER-{connectivity}"
    sr, sc = grid.cell_of(s)
    tr, tc = grid.cell_of(t)
    if math.isinf(grid.weight(sr, sc)) or math.isinf(grid.weight(tr, tc)):
        raise ValidationError("endpoints must lie in finite-weight cells")

    ncols, nrows = grid.ncols, grid.nrows
    start, goal = sr * ncols + sc, tr * ncols + tc
    dist = {start: 0.0}
    parent: dict[int, int] = {}
    done: set[int] = set()
    heap: list[tuple[float, int]] = [(0.0, start)]
    w = grid.weights
    while heap:
        d, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == goal:
            break
        r, c = divmod(node, ncols)
        wa = w[node]
        for dr, dc in moves:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < nrows and 0 <= nc < ncols):
                continue
            nb = nr * ncols + nc
            wb = w[nb]
            if math.isinf(wb):
                continue
            nd = d + grid.cell_size * math.hypot(dr, dc) * (wa + wb) / 2.0
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                parent[nb] = node
                heapq.heappush(heap, (nd, nb))
    if goal not in done:
        return PathResult((), math.inf, method)
    cells = [goal]
    while cells[-1] != start:
        cells.append(parent[cells[-1]])
    cells.reverse()
    if len(cells) == 1:
        vertices = (s,) if s == t else (s, t)
    else:
        inner = [grid.center(*divmod(cell, ncols)) for cell in cells[1:-1]]
        vertices = tuple([s] + inner + [t])
    return PathResult(vertices, dist[goal], method)


# ---------------------------------------------------------------------------
# vector solver

def steiner_fractions(m: int) -> list[float]:
    """First m dyadic fractions: 1/2, 1/4, 3/4, 1/8, 3/8, ... (nested)."""
    if m < 0:
        raise ValidationError("m must be >= 0")
    out: list[float] = []
    denom = 2
    while len(out) < m:
        for num in range(1, denom, 2):
            out.append(num / denom)
            if len(out) == m:
                break
        denom *= 2
    return out


def triangulate(cost_map: CostMap) -> Triangulation:
    """CDT of all region boundaries, extent corners included; each
    triangle is labeled with the region containing its centroid."""
    ext = cost_map.extent
    raw = [
        Point2(ext.min.x, ext.min.y),
        Point2(ext.max.x, ext.min.y),
        Point2(ext.max.x, ext.max.y),
        Point2(ext.min.x, ext.max.y),
    ]
    for poly, _ in cost_map.regions:
        for ring in poly.rings():
            raw.extend(ring.vertices)

    points: list[Point2] = []
    index: dict[tuple[float, float], int] = {}
    for p in raw:
        k = (round(p.x, 9), round(p.y, 9))
        if k not in index:
            index[k] = len(points)
            points.append(p)

    constraints: set[tuple[int, int]] = set()
    for poly, _ in cost_map.regions:
        for ring in poly.rings():
            vs = ring.vertices
            for i in range(len(vs)):
                a = index[(round(vs[i - 1].x, 9), round(vs[i - 1].y, 9))]
                b = index[(round(vs[i].x, 9), round(vs[i].y, 9))]
                for piece in _split_at_vertices(a, b, points):
                    constraints.add(piece)

    tri = constrained_delaunay(points, sorted(constraints))

    region_ids = []
    boxes = [bbox(poly) for poly, _ in cost_map.regions]
    for a, b, c in tri.triangles:
        pa, pb, pc = tri.points[a], tri.points[b], tri.points[c]
        centroid = Point2((pa.x + pb.x + pc.x) / 3, (pa.y + pb.y + pc.y) / 3)
        rid = None
        for k, ((poly, _), box) in enumerate(zip(cost_map.regions, boxes)):
            if (
                box.min.x <= centroid.x <= box.max.x
                and box.min.y <= centroid.y <= box.max.y
                and point_in_polygon(centroid, poly)
            ):
                rid = k
                break
        region_ids.append(rid)
    return Triangulation(tri.points, tri.triangles, tri.constrained_edges, tuple(region_ids))


def _split_at_vertices(a: int, b: int, points: list[Point2]) -> list[tuple[int, int]]:
    """Split constraint a-b at any other input point lying on it."""
    pa, pb = points[a], points[b]
    seg_len = math.hypot(pb.x - pa.x, pb.y - pa.y)
    on_it = []
    for k, p in enumerate(points):
        if k in (a, b):
            continue
        if point_segment_distance(p, pa, pb) <= 1e-9:
            tpar = ((p.x - pa.x) * (pb.x - pa.x) + (p.y - pa.y) * (pb.y - pa.y)) / (
                seg_len * seg_len
            )
            if 1e-12 < tpar < 1 - 1e-12:
                on_it.append((tpar, k))
    chain = [a] + [k for _, k in sorted(on_it)] + [b]
    return [
        (u, v) if u < v else (v, u) for u, v in zip(chain, chain[1:])
    ]


def triangle_weight(cost_map: CostMap, tri: Triangulation, t_index: int) -> float:
    rid = tri.region_ids[t_index]
    return cost_map.default_weight if rid is None else cost_map.regions[rid][1]


def vector_graph(cost_map: CostMap, s: Point2, t: Point2, m: int):
    """Search graph for the vector solver.

    Returns (nodes, adjacency, s_id, t_id, triangulation) where
    adjacency[i] lists (j, cost) arcs; every arc lies inside one
    triangle and costs segment length x that triangle's weight.
    """
    if m < 1:
        raise ValidationError("steiner_per_edge must be >= 1")
    tri = triangulate(cost_map)
    nodes: list[Point2] = list(tri.points)

    fractions = steiner_fractions(m)
    edge_nodes: dict[tuple[int, int], list[int]] = {}
    for u, v in sorted(tri.edges()):
        ids = []
        pu, pv = tri.points[u], tri.points[v]
        for f in fractions:
            ids.append(len(nodes))
            nodes.append(Point2(pu.x + f * (pv.x - pu.x), pu.y + f * (pv.y - pu.y)))
        edge_nodes[(u, v)] = ids

    def locate_or_add(p: Point2) -> int:
        for i, q in enumerate(nodes):
            if abs(q.x - p.x) <= 1e-9 and abs(q.y - p.y) <= 1e-9:
                return i
        nodes.append(p)
        return len(nodes) - 1

    s_id = locate_or_add(s)
    t_id = locate_or_add(t)

    span = max(cost_map.extent.width, cost_map.extent.height, 1.0)
    tol = 1e-9 * span * span

    def in_triangle(p: Point2, ia: int, ib: int, ic: int) -> bool:
        pa, pb, pc = tri.points[ia], tri.points[ib], tri.points[ic]
        d1 = _cross3(pa, pb, p)
        d2 = _cross3(pb, pc, p)
        d3 = _cross3(pc, pa, p)
        return d1 >= -tol and d2 >= -tol and d3 >= -tol

    best: dict[tuple[int, int], float] = {}
    s_covered = t_covered = False
    for k, (ia, ib, ic) in enumerate(tri.triangles):
        w = triangle_weight(cost_map, tri, k)
        group = [ia, ib, ic]
        for u, v in (((ia, ib)), (ib, ic), (ic, ia)):
            group.extend(edge_nodes[(u, v) if u < v else (v, u)])
        for extra in (s_id, t_id):
            if extra not in group and in_triangle(nodes[extra], ia, ib, ic):
                group.append(extra)
        if s_id in group:
            s_covered = True
        if t_id in group:
            t_covered = True
        if math.isinf(w):
            continue
        for x in range(len(group)):
            for y in range(x + 1, len(group)):
                i, j = group[x], group[y]
                key = (i, j) if i < j else (j, i)
                pi, pj = nodes[i], nodes[j]
                cost = w * math.hypot(pj.x - pi.x, pj.y - pi.y)
                if cost < best.get(key, math.inf):
                    best[key] = cost

    if not s_covered or not t_covered:
        raise ValidationError("source and target must lie inside the map extent")
    if math.isinf(cost_map.weight_at(s)) or math.isinf(cost_map.weight_at(t)):
        raise ValidationError("endpoints must lie in finite-weight regions")

    adj: list[list[tuple[int, float]]] = [[] for _ in nodes]
    for (i, j), cost in sorted(best.items()):
        adj[i].append((j, cost))
        adj[j].append((i, cost))
    return nodes, adj, s_id, t_id, tri


def vector_path(cost_map: CostMap, s: Point2, t: Point2, m: int = 4) -> PathResult:
    """Least-cost path through the Steiner-point triangle graph."""
    nodes, adj, s_id, t_id, _ = vector_graph(cost_map, s, t, m)
    method = f"VECTOR({m})"
    dist = {s_id: 0.0}
    parent: dict[int, int] = {}
    done: set[int] = set()
    heap = [(0.0, s_id)]
    while heap:
        d, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == t_id:
            break
        for nb, w in adj[node]:
            nd = d + w
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                parent[nb] = node
                heapq.heappush(heap, (nd, nb))
    if t_id not in done:
        return PathResult((), math.inf, method)
    ids = [t_id]
    while ids[-1] != s_id:
        ids.append(parent[ids[-1]])
    ids.reverse()
    return PathResult(tuple(nodes[i] for i in ids), dist[t_id], method)


# ---------------------------------------------------------------------------
# convergence study

def convergence_report(
    cost_map: CostMap,
    s: Point2,
    t: Point2,
    resolutions,
    connectivities,
    m_values,
    include_timings: bool = False,
) -> list[tuple[str, float, float, float]]:
    """Cost matrix rows (method, resolution_or_m, cost, runtime_ms).

    Timings are reported as 0.0 unless include_timings is set, keeping
    default output byte-stable across runs.
    """
    if not resolutions or not connectivities or not m_values:
        raise ValidationError("resolutions, connectivities and m_values must be non-empty")
    rows: list[tuple[str, float, float, float]] = []
    for res in resolutions:
        grid = rasterize(cost_map, res)
        for conn in connectivities:
            t0 = time.perf_counter()
            r = raster_path(grid, s, t, conn)
            ms = (time.perf_counter() - t0) * 1000.0 if include_timings else 0.0
            rows.append((r.method, float(res), r.total_cost, ms))
    for m in m_values:
        t0 = time.perf_counter()
        r = vector_path(cost_map, s, t, m)
        ms = (time.perf_counter() - t0) * 1000.0 if include_timings else 0.0
        rows.append((r.method, float(m), r.total_cost, ms))
    return rows
