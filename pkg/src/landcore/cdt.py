"""Constrained Delaunay triangulation (incremental with constraint flips).

Bowyer-Watson insertion builds the Delaunay triangulation; constraints
are then forced in by flipping the edges they cross (Sloan's method) and
re-legalizing the neighborhood.  Predicates run on coordinates
normalized to the unit scale, so behavior does not depend on where or
how large the input is.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TriangulationError, ValidationError
from .geometry import Point2

# predicates run on coordinates normalized to ~[-0.5, 0.5], so this is a
# scale-free slack: exactly-cocircular quads (float residue ~1e-16) fall
# below it and are left alone instead of flip-cycling
_EPS = 1e-9


@dataclass(frozen=True)
class Triangulation:
    """Triangle mesh over a point set with optional forced edges.

    ``triangles`` holds CCW vertex-index triples; ``constrained_edges``
    the forced segments as (low, high) index pairs; ``region_ids`` an
    optional per-triangle region label assigned by the caller.
    """

    points: tuple[Point2, ...]
    triangles: tuple[tuple[int, int, int], ...]
    constrained_edges: tuple[tuple[int, int], ...]
    region_ids: tuple = ()

    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                out.add((u, v) if u < v else (v, u))
        return out


def constrained_delaunay(
    points: list[Point2], constraints: list[tuple[int, int]] = ()
) -> Triangulation:
    """Triangulate the points; every constraint ends up as a mesh edge.

    Constraints must connect existing point indices and may not pass
    through other points or cross each other (split them beforehand).
    """
    n = len(points)
    if n < 3:
        raise TriangulationError("need at least 3 points")
    keys = {(round(p.x, 9), round(p.y, 9)) for p in points}
    if len(keys) != n:
        raise ValidationError("duplicate points in triangulation input")

    xs = [p.x for p in points]
    ys = [p.y for p in points]
    cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-30)
    norm = [((p.x - cx) / span, (p.y - cy) / span) for p in points]
    norm += [(0.0, 64.0), (-64.0, -64.0), (64.0, -64.0)]  # super-triangle

    def orient(i: int, j: int, k: int) -> float:
        (ax, ay), (bx, by), (px, py) = norm[i], norm[j], norm[k]
        return (bx - ax) * (py - ay) - (by - ay) * (px - ax)

    def in_circle(tri: tuple[int, int, int], p: int) -> float:
        a, b, c = tri
        if orient(a, b, c) < 0:
            b, c = c, b
        (ax, ay), (bx, by), (kx, ky), (px, py) = norm[a], norm[b], norm[c], norm[p]
        ax -= px
        ay -= py
        bx -= px
        by -= py
        kx -= px
        ky -= py
        return (
            (ax * ax + ay * ay) * (bx * ky - by * kx)
            - (bx * bx + by * by) * (ax * ky - ay * kx)
            + (kx * kx + ky * ky) * (ax * by - ay * bx)
        )

    tris: set[tuple[int, int, int]] = {(n, n + 1, n + 2)}

    def edges_of(t):
        a, b, c = t
        return ((a, b), (b, c), (c, a))

    for p in range(n):
        bad = [t for t in tris if in_circle(t, p) > _EPS]
        if not bad:
            # numerically on the circle of every candidate; claim the
            # triangle whose interior contains the point
            bad = [t for t in tris if _contains(t, p, orient)]
        boundary: dict[tuple[int, int], int] = {}
        for t in bad:
            for u, v in edges_of(t):
                key = (u, v) if u < v else (v, u)
                boundary[key] = boundary.get(key, 0) + 1
            tris.remove(t)
        for (u, v), count in boundary.items():
            if count == 1:
                tris.add(tuple(sorted((u, v, p))))

    wanted = set()
    for a, b in constraints:
        if not (0 <= a < n and 0 <= b < n) or a == b:
            raise ValidationError(f"bad constraint ({a}, {b})")
        wanted.add((a, b) if a < b else (b, a))

    for a, b in sorted(wanted):
        _force_edge(a, b, tris, norm, orient, in_circle, wanted)

    final = tuple(
        sorted(t for t in tris if max(t) < n)
    )
    if not final:
        raise TriangulationError("degenerate input: no triangles (collinear points?)")
    oriented = tuple(
        t if orient(*t) > 0 else (t[0], t[2], t[1]) for t in final
    )
    present = {(u, v) if u < v else (v, u) for t in oriented for u, v in
               (((t[0], t[1])), (t[1], t[2]), (t[2], t[0]))}
    missing = wanted - present
    if missing:
        raise TriangulationError(f"constraints not realized: {sorted(missing)}")
    return Triangulation(tuple(points), oriented, tuple(sorted(wanted)))


def _contains(t, p, orient) -> bool:
    a, b, c = t
    if orient(a, b, c) < 0:
        b, c = c, b
    return (
        orient(a, b, p) >= -_EPS
        and orient(b, c, p) >= -_EPS
        and orient(c, a, p) >= -_EPS
    )


def _seg_cross(norm, a, b, u, v) -> bool:
    """Proper interior crossing of segments a-b and u-v (indices)."""

    def o(i, j, k):
        (ax, ay), (bx, by), (px, py) = norm[i], norm[j], norm[k]
        return (bx - ax) * (py - ay) - (by - ay) * (px - ax)

    if len({a, b, u, v}) < 4:
        return False
    d1, d2 = o(a, b, u), o(a, b, v)
    d3, d4 = o(u, v, a), o(u, v, b)
    if abs(d1) <= _EPS or abs(d2) <= _EPS or abs(d3) <= _EPS or abs(d4) <= _EPS:
        if (abs(d1) <= _EPS and abs(d2) <= _EPS):
            return False  # collinear overlap is a caller error, handled upstream
        return False
    return (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0)


def _force_edge(a, b, tris, norm, orient, in_circle, constrained) -> None:
    from collections import deque

    def edge_map():
        m: dict[tuple[int, int], list] = {}
        for t in tris:
            x, y, z = t
            for u, v in ((x, y), (y, z), (z, x)):
                key = (u, v) if u < v else (v, u)
                m.setdefault(key, []).append(t)
        return m

    def flip(e, em):
        """Replace edge e by the cross-diagonal of its quad if the quad is
        strictly convex; returns the new edge or None."""
        pair = em.get(e, ())
        if len(pair) != 2:
            return None
        t1, t2 = pair
        p = next(i for i in t1 if i not in e)
        q = next(i for i in t2 if i not in e)
        if orient(p, q, e[0]) * orient(p, q, e[1]) >= 0:
            return None
        tris.remove(t1)
        tris.remove(t2)
        tris.add(tuple(sorted((p, q, e[0]))))
        tris.add(tuple(sorted((p, q, e[1]))))
        return (p, q) if p < q else (q, p)

    key_ab = (a, b) if a < b else (b, a)
    em = edge_map()
    queue = deque(sorted(e for e in em if _seg_cross(norm, a, b, *e)))
    stuck = 0
    while key_ab not in em and queue:
        e = queue.popleft()
        if e not in em:
            continue
        new_edge = flip(e, em)
        if new_edge is None:
            # quad not convex yet; retry after neighbors have been flipped
            queue.append(e)
            stuck += 1
            if stuck > 4 * (len(queue) + 1):
                raise TriangulationError(
                    f"cannot realize constraint ({a}, {b}); does it pass "
                    "through a vertex or another constraint?"
                )
            continue
        stuck = 0
        if _seg_cross(norm, a, b, *new_edge):
            queue.append(new_edge)
        em = edge_map()
    if key_ab not in em:
        raise TriangulationError(
            f"constraint ({a}, {b}) neither present nor crossed; "
            "does it pass through a vertex?"
        )

    # re-legalize around the new constraint: Lawson flips on every
    # non-constrained edge whose quad fails the circumcircle test; a
    # per-pair flip budget stops numerically cocircular ping-pong
    flips: dict[tuple[int, int], int] = {}
    for _ in range(100_000):
        em = edge_map()
        improved = False
        for e, pair in sorted(em.items()):
            if e in constrained or e == key_ab or len(pair) != 2:
                continue
            t1, t2 = pair
            q = next(i for i in t2 if i not in e)
            if in_circle(t1, q) <= _EPS:
                continue
            budget_key = tuple(sorted(set(t1) | set(t2)))
            if flips.get(budget_key, 0) > 32:
                continue
            new_edge = flip(e, em)
            if new_edge is not None:
                flips[budget_key] = flips.get(budget_key, 0) + 1
                improved = True
                break
        if not improved:
            return
    raise TriangulationError("legalization did not converge")
