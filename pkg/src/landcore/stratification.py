"""Stratified sampling of field maps and cultivable-land statistics.

The extent is cut into grid blocks; each block is classified HIGH,
MEDIUM or LOW by the share of its area covered by fields (pivot
irrigation forces HIGH).  Sample points are allocated to strata in
proportion to stratum area times prior crop probability and drawn
uniformly inside the stratum's blocks.  The expansion estimator then
scales observed crop fractions back to areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ValidationError
from .geometry import Box2, Point2, Polygon2, bbox, boxes_overlap

HIGH = "HIGH"
MEDIUM = "MEDIUM"
LOW = "LOW"
LEVELS = (HIGH, MEDIUM, LOW)

DEFAULT_THRESHOLDS = (0.6, 0.3)
DEFAULT_PRIORS = {HIGH: 0.9, MEDIUM: 0.5, LOW: 0.1}


@dataclass(frozen=True)
class FieldMap:
    """Digitized fields over an extent, plus the stratification grid size."""

    fields: tuple[tuple[Polygon2, bool, bool], ...]  # (geometry, pivot, small)
    extent: Box2
    block_size: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "fields", tuple(tuple(f) for f in self.fields))
        if not self.block_size > 0:
            raise ValidationError("block_size must be > 0")
        for i, (poly, _, _) in enumerate(self.fields):
            if not isinstance(poly, Polygon2):
                raise ValidationError(f"field {i}: not a polygon")


@dataclass(frozen=True)
class Stratum:
    level: str
    blocks: tuple[Box2, ...]
    area: float
    prior_crop_probability: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.level not in LEVELS:
            raise ValidationError(f"unknown stratum level {self.level!r}")
        if not 0 < self.prior_crop_probability <= 1:
            raise ValidationError("prior_crop_probability must be in (0, 1]")
        if abs(self.area - sum(b.area() for b in self.blocks)) > 1e-6 * max(self.area, 1.0):
            raise ValidationError("stratum area must equal the sum of its block areas")


@dataclass(frozen=True)
class SamplePlan:
    """Sample points per stratum level, in stratum order, with the seed."""

    counts: tuple[tuple[str, int], ...]
    points: tuple[tuple[str, Point2], ...]
    seed: int

    def count_for(self, level: str) -> int:
        return dict(self.counts).get(level, 0)

    def points_for(self, level: str) -> list[Point2]:
        return [p for lvl, p in self.points if lvl == level]


@dataclass(frozen=True)
class LandStats:
    year: int
    cultivable_area: float
    stderr: float
    loss_rate: float
    import_requirement: float

    def __post_init__(self) -> None:
        if self.cultivable_area < 0 or self.stderr < 0:
            raise ValidationError("cultivable_area and stderr must be >= 0")


@dataclass(frozen=True)
class LossReport:
    """Yearly change of cultivable area (negative = losing land)."""

    latest_diff: float
    latest_diff_frac: float
    slope: float
    slope_frac: float


# ---------------------------------------------------------------------------
# geometry helpers

def clip_area_to_box(poly: Polygon2, box: Box2) -> float:
    """Area of polygon ∩ box via Sutherland-Hodgman clipping."""
    total = _ring_clip_area(poly.outer.vertices, box)
    for island in poly.islands:
        total -= _ring_clip_area(island.vertices, box)
    return max(total, 0.0)


def _ring_clip_area(vertices, box: Box2) -> float:
    pts = [(p.x, p.y) for p in vertices]
    for edge in ("l", "r", "b", "t"):
        if not pts:
            return 0.0
        nxt = []
        for i in range(len(pts)):
            cur, prev = pts[i], pts[i - 1]
            cin, pin = _inside(cur, edge, box), _inside(prev, edge, box)
            if cin:
                if not pin:
                    nxt.append(_isect(prev, cur, edge, box))
                nxt.append(cur)
            elif pin:
                nxt.append(_isect(prev, cur, edge, box))
        pts = nxt
    if len(pts) < 3:
        return 0.0
    s = 0.0
    for i in range(len(pts)):
        x0, y0 = pts[i - 1]
        x1, y1 = pts[i]
        s += x0 * y1 - x1 * y0
    return abs(s) / 2.0


def _inside(p, edge: str, box: Box2) -> bool:
    x, y = p
    if edge == "l":
        return x >= box.min.x
    if edge == "r":
        return x <= box.max.x
    if edge == "b":
        return y >= box.min.y
    return y <= box.max.y


def _isect(a, b, edge: str, box: Box2):
    (x0, y0), (x1, y1) = a, b
    if edge in ("l", "r"):
        xe = box.min.x if edge == "l" else box.max.x
        t = (xe - x0) / (x1 - x0)
        return (xe, y0 + t * (y1 - y0))
    ye = box.min.y if edge == "b" else box.max.y
    t = (ye - y0) / (y1 - y0)
    return (x0 + t * (x1 - x0), ye)


# ---------------------------------------------------------------------------
# stratification

def blocks_of(extent: Box2, block_size: float) -> list[Box2]:
    """Grid blocks tiling the extent, row-major from the bottom-left,
    clipped to the extent so they partition it exactly."""
    if extent.width <= 0 or extent.height <= 0:
        raise ValidationError("extent must have positive area")
    ncols = max(1, math.ceil(extent.width / block_size - 1e-9))
    nrows = max(1, math.ceil(extent.height / block_size - 1e-9))
    out = []
    for r in range(nrows):
        for c in range(ncols):
            out.append(
                Box2(
                    Point2(
                        extent.min.x + c * block_size,
                        extent.min.y + r * block_size,
                    ),
                    Point2(
                        min(extent.min.x + (c + 1) * block_size, extent.max.x),
                        min(extent.min.y + (r + 1) * block_size, extent.max.y),
                    ),
                )
            )
    return out


def stratify(
    fm: FieldMap,
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
    priors: dict[str, float] | None = None,
) -> list[Stratum]:
    """Classify every grid block as HIGH / MEDIUM / LOW.

    A block is HIGH when its field-density reaches the high threshold or
    any pivot-irrigated field intersects it, MEDIUM at the medium
    threshold, LOW otherwise.
    """
    high_frac, medium_frac = thresholds
    if not 0 < medium_frac < high_frac <= 1:
        raise ValidationError("thresholds must satisfy 0 < medium < high <= 1")
    priors = dict(DEFAULT_PRIORS if priors is None else priors)

    field_boxes = [bbox(poly) for poly, _, _ in fm.fields]
    buckets: dict[str, list[Box2]] = {HIGH: [], MEDIUM: [], LOW: []}
    for block in blocks_of(fm.extent, fm.block_size):
        covered = 0.0
        pivot_hit = False
        for (poly, pivot, _), fb in zip(fm.fields, field_boxes):
            if not boxes_overlap(fb, block):
                continue
            inter = clip_area_to_box(poly, block)
            covered += inter
            if pivot and inter > 0:
                pivot_hit = True
        density = covered / block.area()
        if pivot_hit or density >= high_frac:
            buckets[HIGH].append(block)
        elif density >= medium_frac:
            buckets[MEDIUM].append(block)
        else:
            buckets[LOW].append(block)

    return [
        Stratum(
            level,
            tuple(blocks),
            sum(b.area() for b in blocks),
            priors[level],
        )
        for level, blocks in buckets.items()
    ]


def allocate_samples(strata: list[Stratum], total_n: int, seed: int) -> SamplePlan:
    """Largest-remainder allocation proportional to area x prior, then
    uniform point draws inside each stratum's blocks (area-weighted)."""
    weights = [s.area * s.prior_crop_probability for s in strata]
    if all(w == 0 for w in weights):
        raise ValidationError("all strata are empty")
    nonempty = sum(1 for s in strata if s.area > 0)
    if total_n < nonempty:
        raise ValidationError(
            f"total_n={total_n} is less than the {nonempty} non-empty strata"
        )
    counts = largest_remainder(weights, total_n)

    rng = np.random.default_rng(seed)
    points: list[tuple[str, Point2]] = []
    for s, n in zip(strata, counts):
        if n == 0:
            continue
        areas = np.array([b.area() for b in s.blocks])
        picks = rng.choice(len(s.blocks), size=n, p=areas / areas.sum())
        for b_idx in picks:
            b = s.blocks[int(b_idx)]
            x = rng.uniform(b.min.x, b.max.x)
            y = rng.uniform(b.min.y, b.max.y)
            points.append((s.level, Point2(x, y)))
    return SamplePlan(
        tuple((s.level, n) for s, n in zip(strata, counts)),
        tuple(points),
        seed,
    )


def largest_remainder(weights: list[float], total: int) -> list[int]:
    """Hamilton apportionment; ties go to the earlier entry."""
    wsum = sum(weights)
    if wsum <= 0:
        raise ValidationError("weights must not all be zero")
    quotas = [w * total / wsum for w in weights]
    floors = [int(math.floor(q)) for q in quotas]
    left = total - sum(floors)
    order = sorted(
        range(len(weights)), key=lambda i: (-(quotas[i] - floors[i]), i)
    )
    for i in order[:left]:
        floors[i] += 1
    return floors


# ---------------------------------------------------------------------------
# estimation

def estimate_cultivable_area(
    strata: list[Stratum],
    plan: SamplePlan,
    observations,
) -> tuple[float, float]:
    """Stratified expansion estimate (area, stderr).

    ``observations`` holds one crop/no-crop flag per plan point, either
    as a sequence aligned with ``plan.points`` or as a mapping from
    point index to flag.  Strata without sample points contribute zero.
    """
    if isinstance(observations, dict):
        flags = [observations.get(i) for i in range(len(plan.points))]
    else:
        flags = list(observations)
        if len(flags) < len(plan.points):
            flags += [None] * (len(plan.points) - len(flags))
    if len(flags) > len(plan.points):
        raise DataError(
            f"{len(flags)} observations for {len(plan.points)} sample points"
        )
    by_level: dict[str, list[bool]] = {}
    for (level, _), flag in zip(plan.points, flags):
        if flag is None:
            raise DataError(f"missing outcome for a {level} sample point")
        by_level.setdefault(level, []).append(bool(flag))

    area = 0.0
    var = 0.0
    for s in strata:
        outcomes = by_level.get(s.level, [])
        n_h = plan.count_for(s.level)
        if n_h != len(outcomes):
            raise DataError(
                f"stratum {s.level}: {len(outcomes)} outcomes for {n_h} points"
            )
        if n_h == 0:
            continue
        p_hat = sum(outcomes) / n_h
        area += s.area * p_hat
        var += s.area**2 * p_hat * (1.0 - p_hat) / max(n_h - 1, 1)
    return area, math.sqrt(var)


def yearly_loss(series: list[tuple[int, float]]) -> LossReport:
    """Latest-vs-previous change and least-squares slope, in area/year
    and as a fraction of the first year's area."""
    if len(series) < 2:
        raise ValidationError("need at least two years")
    years = [y for y, _ in series]
    if len(set(years)) != len(years):
        raise ValidationError("duplicate years in series")
    ordered = sorted(series)
    (y0, a0), (y1, a1) = ordered[-2], ordered[-1]
    latest = (a1 - a0) / (y1 - y0)

    xs = np.array([float(y) for y, _ in ordered])
    ys = np.array([float(a) for _, a in ordered])
    slope = float(np.polyfit(xs, ys, 1)[0])

    base = ordered[0][1]
    frac = (lambda v: v / base if base else 0.0)
    return LossReport(latest, frac(latest), slope, frac(slope))


def import_requirement(
    population: float,
    per_capita_demand: float,
    cultivable_area: float,
    crop_yield: float,
) -> float:
    """Shortfall between demand and production, floored at zero."""
    for name, v in (
        ("population", population),
        ("per_capita_demand", per_capita_demand),
        ("cultivable_area", cultivable_area),
        ("yield", crop_yield),
    ):
        if v < 0:
            raise ValidationError(f"{name} must be >= 0")
    return max(0.0, population * per_capita_demand - cultivable_area * crop_yield)
