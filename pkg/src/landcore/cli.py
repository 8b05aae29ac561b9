"""Command-line surface: query, topology, ccm, stratify, report, render.

One command per invocation; results go to stdout as CSV (plus optional
output files), diagnostics to stderr.  Exit codes: 0 success,
1 validation error, 2 no path / no result by contract, 3 I/O error.
All output is deterministic given the input files, config and seed;
the seed comes from --seed, then the config file, then the
LANDCORE_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys

from . import ccm as _ccm
from . import geometry as _geom
from . import query as _query
from . import stratification as _strat
from . import topology as _topo
from .document import GeoDocument, RunConfig, load_config, load_document
from .errors import DataError, LandcoreError, NotFoundError, ValidationError
from .geometry import Box2, Point2
from .svg import Scene, render_svg


# ---------------------------------------------------------------------------
# small helpers

def _point(text: str) -> Point2:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    return Point2(x, y)


def _box(text: str) -> Box2:
    try:
        x0, y0, x1, y1 = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x0,y0,x1,y1', got {text!r}") from None
    return Box2(Point2(x0, y0), Point2(x1, y1))


def _date(text: str) -> _dt.date:
    try:
        return _dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ISO date, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",")]


def _emit_csv(rows, header, out=None) -> None:
    """Write rows as CSV with \\n line endings to stdout or a file path."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def _load_inputs(ns) -> tuple[GeoDocument, RunConfig]:
    doc = load_document(ns.data)
    cfg = load_config(ns.config) if getattr(ns, "config", None) else RunConfig()
    return doc, cfg


def _seed_of(ns, cfg: RunConfig) -> int:
    if getattr(ns, "seed", None) is not None:
        return ns.seed
    if cfg.seed is not None:
        return cfg.seed
    env = os.environ.get("LANDCORE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"LANDCORE_SEED must be an integer, got {env!r}") from None
    return 0


def _ccm_extent(doc: GeoDocument, cfg: RunConfig, pts: list[Point2]) -> Box2:
    """Config extent verbatim, else data extent grown to include s and t."""
    ext = cfg.extent_box()
    if ext is not None:
        return ext
    ext = doc.geometry_extent()
    xs = [ext.min.x, ext.max.x] + [p.x for p in pts]
    ys = [ext.min.y, ext.max.y] + [p.y for p in pts]
    return Box2(Point2(min(xs), min(ys)), Point2(max(xs), max(ys)))


def _stratify(doc: GeoDocument, cfg: RunConfig):
    extent = cfg.extent_box() or doc.geometry_extent()
    fm = doc.field_map(extent, cfg.block_size)
    return _strat.stratify(fm, cfg.thresholds, cfg.priors_dict())


def _read_outcomes(path) -> dict[int, bool]:
    out: dict[int, bool] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["point_id", "crop"]:
            raise DataError(f"{path}: expected header 'point_id,crop', got {header!r}")
        for i, row in enumerate(reader):
            try:
                pid, crop = int(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise DataError(f"{path}: bad row {i + 2}: {row!r}") from None
            if crop not in (0, 1):
                raise DataError(f"{path}: row {i + 2}: crop must be 0 or 1")
            if pid in out:
                raise DataError(f"{path}: duplicate point_id {pid}")
            out[pid] = bool(crop)
    return out


def _read_path_csv(path) -> tuple[Point2, ...]:
    pts = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "y"]:
            raise DataError(f"{path}: expected header 'x,y', got {header!r}")
        for row in reader:
            pts.append(Point2(float(row[0]), float(row[1])))
    return tuple(pts)


# ---------------------------------------------------------------------------
# commands

def cmd_query(ns) -> int:
    doc, _ = _load_inputs(ns)
    ds = doc.dataset().indexed()
    if ns.qcmd == "area-gt":
        rows = [
            (t.name, t.population, _geom.area(t.region))
            for t in _query.towns_area_gt(ds, ns.threshold)
        ]
        _emit_csv(rows, ["name", "population", "area"])
    elif ns.qcmd == "bbox":
        rows = [(t.name, t.population) for t in _query.towns_bbox_overlapping(ds, ns.box)]
        _emit_csv(rows, ["name", "population"])
    elif ns.qcmd == "roads":
        rows = [
            (r.name, _geom.length(r.shape), r.construct.isoformat())
            for r in _query.roads_short_recent(ds, ns.max_length, ns.after)
        ]
        _emit_csv(rows, ["name", "length_m", "construct"])
    elif ns.qcmd == "near-road":
        rows = [
            (t.name, t.population)
            for t in _query.towns_near_road(ds, ns.dist, ns.road)
        ]
        _emit_csv(rows, ["name", "population"])
    else:  # near-any
        rows = [
            (t.name, r.name) for t, r in _query.towns_near_any_road(ds, ns.dist)
        ]
        _emit_csv(rows, ["town", "road"])
    return 0


def _store_payload(store: _topo.TopologyStore) -> dict:
    return {
        "catalog": {
            "ind_relname": store.catalog.ind_relname,
            "ind_relattr": store.catalog.ind_relattr,
            "topoltype": store.catalog.topoltype,
            "ref_count": store.catalog.ref_count,
            "ref_relname": store.catalog.ref_relname,
            "ref_relid": store.catalog.ref_relid,
            "ref_relvis": store.catalog.ref_relvis,
            "ref_relbbox": store.catalog.ref_relbbox,
        },
        "edges": [
            {
                "b_id": b_id,
                "line": [[p.x, p.y] for p in e.line.vertices],
                "a_id_left": e.a_id_left,
                "a_id_right": e.a_id_right,
            }
            for b_id, e in sorted(store.edges.items())
        ],
        "areas": [
            {"a_id": a_id, "edge_refs": list(rec.edge_refs)}
            for a_id, rec in sorted(store.areas.items())
        ],
    }


def cmd_topology(ns) -> int:
    doc, _ = _load_inputs(ns)
    if not doc.regions:
        raise ValidationError("document has no regions to build a topology from")
    store = _topo.build_topology(doc.regions)
    if ns.tcmd == "build":
        if ns.out:
            with open(ns.out, "w", encoding="utf-8") as fh:
                json.dump(_store_payload(store), fh, indent=2, sort_keys=True)
                fh.write("\n")
        _emit_csv(
            [(
                len(store.edges),
                len(store.areas),
                _topo.total_edge_vertices(store),
                _topo.total_input_vertices(doc.regions),
            )],
            ["edges", "areas", "stored_vertices", "input_vertices"],
        )
    else:  # window
        results = _topo.window_query(store, ns.box, ns.edge_box)
        rows = [
            (a_id, _geom.area(poly), 1 + len(poly.islands))
            for a_id, poly in results
        ]
        _emit_csv(rows, ["a_id", "area", "rings"])
    return 0


def cmd_ccm(ns) -> int:
    doc, cfg = _load_inputs(ns)
    if ns.ccmd == "converge":
        pts = [ns.src, ns.dst]
        cmap = doc.cost_map(_ccm_extent(doc, cfg, pts))
        rows = _ccm.convergence_report(
            cmap,
            ns.src,
            ns.dst,
            ns.resolutions,
            ns.connectivities,
            ns.steiner_list,
            include_timings=ns.timings,
        )
        _emit_csv(rows, ["method", "resolution_or_m", "cost", "runtime_ms"])
        return 0

    cmap = doc.cost_map(_ccm_extent(doc, cfg, [ns.src, ns.dst]))
    if ns.ccmd == "raster":
        cell = ns.cell_size if ns.cell_size is not None else cfg.cell_size
        conn = ns.connectivity if ns.connectivity is not None else cfg.connectivity
        grid = _ccm.rasterize(cmap, cell)
        result = _ccm.raster_path(grid, ns.src, ns.dst, conn)
    else:  # vector
        m = ns.steiner if ns.steiner is not None else cfg.steiner_m
        result = _ccm.vector_path(cmap, ns.src, ns.dst, m)
    if not result.found():
        print("no path", file=sys.stderr)
        return 2
    _emit_csv(
        [(result.method, result.total_cost, len(result.vertices))],
        ["method", "cost", "vertices"],
    )
    if ns.path_out:
        _emit_csv([(p.x, p.y) for p in result.vertices], ["x", "y"], out=ns.path_out)
    return 0


def cmd_stratify(ns) -> int:
    doc, cfg = _load_inputs(ns)
    strata = _stratify(doc, cfg)
    plan = _strat.allocate_samples(strata, cfg.total_samples, _seed_of(ns, cfg))
    _emit_csv(
        [
            (s.level, len(s.blocks), s.area, s.prior_crop_probability, plan.count_for(s.level))
            for s in strata
        ],
        ["level", "blocks", "area", "prior", "samples"],
    )
    plan_rows = [(i, lvl, p.x, p.y) for i, (lvl, p) in enumerate(plan.points)]
    if ns.plan_out:
        _emit_csv(plan_rows, ["point_id", "level", "x", "y"], out=ns.plan_out)
    else:
        sys.stdout.write("\n")
        _emit_csv(plan_rows, ["point_id", "level", "x", "y"])
    return 0


def cmd_report(ns) -> int:
    doc, cfg = _load_inputs(ns)
    series = list(cfg.series)
    if ns.outcomes:
        strata = _stratify(doc, cfg)
        plan = _strat.allocate_samples(strata, cfg.total_samples, _seed_of(ns, cfg))
        area, stderr = _strat.estimate_cultivable_area(strata, plan, _read_outcomes(ns.outcomes))
        year = cfg.year or (max(y for y, _ in series) if series else 0)
        if all(y != year for y, _ in series):
            series.append((year, area))
    elif series:
        series.sort()
        year, area = series[-1]
        stderr = 0.0
    else:
        raise ValidationError("report needs --outcomes or a config 'series'")

    loss_rate = _strat.yearly_loss(series).slope_frac if len(series) >= 2 else 0.0
    shortfall = _strat.import_requirement(
        cfg.population, cfg.per_capita_demand, area, cfg.crop_yield
    )
    stats = _strat.LandStats(year, area, stderr, loss_rate, shortfall)
    _emit_csv(
        [(stats.year, stats.cultivable_area, stats.stderr, stats.loss_rate,
          stats.import_requirement)],
        ["year", "cultivable_area", "stderr", "loss_rate", "import_requirement"],
    )
    return 0


def cmd_render(ns) -> int:
    doc, cfg = _load_inputs(ns)
    polygons = []
    polygons += [("region", poly) for _, poly in doc.regions]
    polygons += [("field", poly) for poly, _, _ in doc.fields]
    polygons += [
        ("cost-inf" if math.isinf(w) else "cost", poly) for poly, w in doc.cost_regions
    ]
    polygons += [("town", t.region) for t in doc.towns]
    polylines = [("road", r.shape) for r in doc.roads]
    strata = tuple(_stratify(doc, cfg)) if ns.strata else ()
    path = _read_path_csv(ns.path) if ns.path else ()
    scene = Scene(
        tuple(polygons),
        tuple(polylines),
        strata,
        path,
        cfg.extent_box(),
    )
    render_svg(scene, ns.out)
    return 0


# ---------------------------------------------------------------------------
# parser / dispatch

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="landcore",
        description="Land assessment toolkit: spatial queries, topological "
        "storage, least-cost paths, stratified sampling, SVG rendering.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, config=True, seed=False):
        sp.add_argument("--data", required=True, help="geodata JSON document")
        if config:
            sp.add_argument("--config", help="run configuration JSON file")
        if seed:
            sp.add_argument("--seed", type=int, help="override the RNG seed")

    q = sub.add_parser("query", help="spatial queries over towns and roads")
    qsub = q.add_subparsers(dest="qcmd", required=True)
    qa = qsub.add_parser("area-gt", help="towns with region area above a threshold")
    qa.add_argument("--threshold", type=float, required=True)
    qb = qsub.add_parser("bbox", help="towns whose region overlaps a box")
    qb.add_argument("--box", type=_box, required=True, metavar="X0,Y0,X1,Y1")
    qr = qsub.add_parser("roads", help="roads shorter than a bound, built after a date")
    qr.add_argument("--max-length", type=float, required=True)
    qr.add_argument("--after", type=_date, required=True, metavar="YYYY-MM-DD")
    qn = qsub.add_parser("near-road", help="towns within a distance of a named road")
    qn.add_argument("--road", required=True)
    qn.add_argument("--dist", type=float, required=True)
    qy = qsub.add_parser("near-any", help="town/road pairs within a distance")
    qy.add_argument("--dist", type=float, required=True)
    for sp in (qa, qb, qr, qn, qy):
        add_common(sp, config=False)
        sp.set_defaults(func=cmd_query)

    t = sub.add_parser("topology", help="shared-boundary storage of partitions")
    tsub = t.add_subparsers(dest="tcmd", required=True)
    tb = tsub.add_parser("build", help="build a store from the document regions")
    tb.add_argument("--out", help="write the serialized store JSON here")
    tw = tsub.add_parser("window", help="window query over the stored partition")
    tw.add_argument("--box", type=_box, required=True, metavar="X0,Y0,X1,Y1")
    tw.add_argument("--edge-box", choices=("abox", "bbox"), default="abox")
    for sp in (tb, tw):
        add_common(sp, config=False)
        sp.set_defaults(func=cmd_topology)

    c = sub.add_parser("ccm", help="least-cost paths over weighted regions")
    csub = c.add_subparsers(dest="ccmd", required=True)
    cr = csub.add_parser("raster", help="grid Dijkstra path")
    cr.add_argument("--connectivity", type=int, choices=(4, 8, 16))
    cr.add_argument("--cell-size", type=float)
    cv = csub.add_parser("vector", help="triangulation + Steiner graph path")
    cv.add_argument("--steiner", type=int, metavar="M")
    cc = csub.add_parser("converge", help="cost table across resolutions and m")
    cc.add_argument("--resolutions", type=_float_list, required=True, metavar="R1,R2,...")
    cc.add_argument("--connectivities", type=_int_list, default=[4, 8], metavar="C1,C2,...")
    cc.add_argument("--steiner-list", type=_int_list, default=[1, 2, 4], metavar="M1,M2,...")
    cc.add_argument("--timings", action="store_true", help="report real runtimes")
    for sp in (cr, cv, cc):
        add_common(sp)
        sp.add_argument("--from", dest="src", type=_point, required=True, metavar="X,Y")
        sp.add_argument("--to", dest="dst", type=_point, required=True, metavar="X,Y")
        if sp is not cc:
            sp.add_argument("--path-out", help="write path vertices CSV here")
        sp.set_defaults(func=cmd_ccm)

    s = sub.add_parser("stratify", help="stratify fields and draw a sample plan")
    add_common(s, seed=True)
    s.add_argument("--plan-out", help="write the sample plan CSV here")
    s.set_defaults(func=cmd_stratify)

    r = sub.add_parser("report", help="cultivable-land statistics")
    add_common(r, seed=True)
    r.add_argument("--outcomes", help="sample outcomes CSV (point_id,crop)")
    r.set_defaults(func=cmd_report)

    v = sub.add_parser("render", help="draw the document as a static SVG")
    add_common(v)
    v.add_argument("--out", required=True, help="output .svg path")
    v.add_argument("--strata", action="store_true", help="overlay stratification blocks")
    v.add_argument("--path", help="overlay a path from a vertices CSV (x,y)")
    v.set_defaults(func=cmd_render)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:  # argparse handles --help and usage errors
        return 0 if not e.code else 1
    try:
        return ns.func(ns)
    except NotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except LandcoreError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
