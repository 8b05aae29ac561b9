"""landcore: land-assessment geospatial engine.

Spatial query operators over towns and roads, topological polygon
storage with windowed retrieval, weighted-region least-cost paths in
raster and vector form, and stratified cultivable-land estimation.
"""

from .ccm import (
    INFINITE,
    CostGrid,
    CostMap,
    PathResult,
    Triangulation,
    constrained_delaunay,
    convergence_report,
    raster_path,
    rasterize,
    triangulate,
    vector_path,
)
from .cli import run_cli
from .document import (
    GeoDocument,
    RunConfig,
    load_config,
    load_document,
    save_document,
)
from .errors import (
    DataError,
    IntegrityError,
    LandcoreError,
    NotFoundError,
    PartitionError,
    SnappingError,
    TriangulationError,
    ValidationError,
)
from .geometry import (
    SNAP_EPS,
    Box2,
    Point2,
    Polygon2,
    Polyline2,
    Ring,
    area,
    bbox,
    boxes_overlap,
    length,
    min_dist_polygon_polyline,
    point_in_polygon,
    point_segment_distance,
)
from .query import (
    BboxIndex,
    Dataset,
    Road,
    Town,
    roads_short_recent,
    towns_area_gt,
    towns_bbox_overlapping,
    towns_near_any_road,
    towns_near_road,
)
from .stratification import (
    HIGH,
    LOW,
    MEDIUM,
    FieldMap,
    LandStats,
    SamplePlan,
    Stratum,
    allocate_samples,
    estimate_cultivable_area,
    import_requirement,
    stratify,
    yearly_loss,
)
from .svg import Scene, Viewport, render_svg
from .topology import (
    AreaRecord,
    Edge,
    TopologyCatalog,
    TopologyStore,
    build_topology,
    reconstruct_polygon,
    select_edges,
    total_edge_vertices,
    total_input_vertices,
    window_query,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
