"""Deterministic SVG 1.1 rendering of geometries, strata and paths.

The viewport is fixed at 1000 units wide; height follows the data
extent's aspect ratio.  Output is byte-stable: element order is the
scene order (strata, polygons, polylines, path), coordinates are
emitted with their shortest round-trip representation, and no
timestamps or random ids appear anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .geometry import Box2, Point2, Polygon2, Polyline2, bbox
from .stratification import HIGH, LOW, MEDIUM, Stratum

VIEW_WIDTH = 1000.0
MARGIN = 20.0

#: fill / stroke styling per scene kind; unknown kinds fall back to "default"
STYLES = {
    "town": 'fill="#c6dbef" stroke="#2171b5" stroke-width="1"',
    "road": 'fill="none" stroke="#636363" stroke-width="2"',
    "region": 'fill="#f7f4e9" stroke="#8c8c8c" stroke-width="1"',
    "field": 'fill="#a1d99b" stroke="#31a354" stroke-width="1"',
    "cost": 'fill="#fee0b6" stroke="#e08214" stroke-width="1"',
    "cost-inf": 'fill="#555555" stroke="#252525" stroke-width="1"',
    "default": 'fill="#dddddd" stroke="#999999" stroke-width="1"',
}
STRATUM_FILL = {HIGH: "#1b7837", MEDIUM: "#fdb863", LOW: "#f7f7f7"}
PATH_STYLE = 'fill="none" stroke="#d7191c" stroke-width="3" stroke-linejoin="round"'


@dataclass(frozen=True)
class Scene:
    """What to draw: kind-tagged geometries plus optional strata and path."""

    polygons: tuple[tuple[str, Polygon2], ...] = ()
    polylines: tuple[tuple[str, Polyline2], ...] = ()
    strata: tuple[Stratum, ...] = ()
    path: tuple[Point2, ...] = ()
    extent: Box2 | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "polygons", tuple(tuple(p) for p in self.polygons))
        object.__setattr__(self, "polylines", tuple(tuple(p) for p in self.polylines))
        object.__setattr__(self, "strata", tuple(self.strata))
        object.__setattr__(self, "path", tuple(self.path))

    def is_empty(self) -> bool:
        return not (self.polygons or self.polylines or self.strata or self.path)

    def data_extent(self) -> Box2:
        if self.extent is not None:
            return self.extent
        boxes = [bbox(g) for _, g in self.polygons]
        boxes += [bbox(g) for _, g in self.polylines]
        boxes += [b for s in self.strata for b in s.blocks]
        if self.path:
            xs = [p.x for p in self.path]
            ys = [p.y for p in self.path]
            boxes.append(Box2(Point2(min(xs), min(ys)), Point2(max(xs), max(ys))))
        if not boxes:
            raise ValidationError("scene is empty")
        return Box2(
            Point2(min(b.min.x for b in boxes), min(b.min.y for b in boxes)),
            Point2(max(b.max.x for b in boxes), max(b.max.y for b in boxes)),
        )


@dataclass(frozen=True)
class Viewport:
    """Maps data coordinates into the fixed SVG viewport (y flipped)."""

    extent: Box2
    scale: float = field(init=False)
    height: float = field(init=False)

    def __post_init__(self) -> None:
        span = self.extent.width if self.extent.width > 0 else 1.0
        object.__setattr__(self, "scale", (VIEW_WIDTH - 2 * MARGIN) / span)
        vspan = self.extent.height if self.extent.height > 0 else 1.0
        object.__setattr__(self, "height", vspan * self.scale + 2 * MARGIN)

    def to_svg(self, p: Point2) -> tuple[float, float]:
        return (
            MARGIN + (p.x - self.extent.min.x) * self.scale,
            MARGIN + (self.extent.max.y - p.y) * self.scale,
        )

    def to_data(self, sx: float, sy: float) -> Point2:
        return Point2(
            self.extent.min.x + (sx - MARGIN) / self.scale,
            self.extent.max.y - (sy - MARGIN) / self.scale,
        )


def _ring_subpath(vertices, vp: Viewport) -> str:
    parts = []
    for i, p in enumerate(vertices):
        sx, sy = vp.to_svg(p)
        parts.append(f"{'M' if i == 0 else 'L'} {sx!r} {sy!r}")
    parts.append("Z")
    return " ".join(parts)


def polygon_path_d(poly: Polygon2, vp: Viewport) -> str:
    return " ".join(
        _ring_subpath(ring.vertices, vp) for ring in (poly.outer, *poly.islands)
    )


def polyline_path_d(vertices, vp: Viewport) -> str:
    parts = []
    for i, p in enumerate(vertices):
        sx, sy = vp.to_svg(p)
        parts.append(f"{'M' if i == 0 else 'L'} {sx!r} {sy!r}")
    return " ".join(parts)


def render_svg(scene: Scene, out=None) -> str:
    """Render the scene to SVG text; write it to ``out`` when given."""
    if scene.is_empty():
        raise ValidationError("scene is empty")
    vp = Viewport(scene.data_extent())

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{VIEW_WIDTH!r}" height="{vp.height!r}" '
        f'viewBox="0 0 {VIEW_WIDTH!r} {vp.height!r}">',
    ]
    for stratum in scene.strata:
        fill = STRATUM_FILL[stratum.level]
        for block in stratum.blocks:
            x0, y0 = vp.to_svg(Point2(block.min.x, block.max.y))
            lines.append(
                f'<rect class="stratum-{stratum.level.lower()}" x="{x0!r}" y="{y0!r}" '
                f'width="{block.width * vp.scale!r}" height="{block.height * vp.scale!r}" '
                f'fill="{fill}" fill-opacity="0.55" stroke="#666666" stroke-width="0.5"/>'
            )
    for kind, poly in scene.polygons:
        style = STYLES.get(kind, STYLES["default"])
        lines.append(
            f'<path class="{kind}" {style} fill-rule="evenodd" '
            f'd="{polygon_path_d(poly, vp)}"/>'
        )
    for kind, line in scene.polylines:
        style = STYLES.get(kind, STYLES["default"])
        lines.append(f'<path class="{kind}" {style} d="{polyline_path_d(line.vertices, vp)}"/>')
    if scene.path:
        if len(scene.path) == 1:
            sx, sy = vp.to_svg(scene.path[0])
            lines.append(f'<circle class="ccm-path" cx="{sx!r}" cy="{sy!r}" r="4" fill="#d7191c"/>')
        else:
            lines.append(
                f'<path class="ccm-path" {PATH_STYLE} d="{polyline_path_d(scene.path, vp)}"/>'
            )
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"

    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text
