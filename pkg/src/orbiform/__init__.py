"""orbiform: minimal-area bodies of constant width 1 with prescribed inradius.

The library constructs, deforms, and measures Reuleaux polygons, and solves
the area-minimization problem over the minimal annulus in closed form.
"""

from .formulas import (
    DomainError,
    INRADIUS_MAX,
    INRADIUS_MIN,
    N_of_r,
    area_A,
    cluster_arc_a,
    cluster_arc_b,
    d2F_dh2,
    dF_dh,
    extremal_arc_length,
    h_of_r,
    is_regular_value,
    regular_inradius,
    sector_area_F,
)
from .geometry import (
    AnnulusReport,
    BoundarySample,
    ReuleauxPolygon,
    ValidationReport,
    build_from_arc_lengths,
    build_optimal,
    build_regular,
    build_rigid,
    exact_area,
    hausdorff_distance,
    minimal_annulus,
    polygon_from_json,
    polygon_from_vertices,
    polygon_to_json,
    sample_boundary,
    smallest_enclosing_circle,
    support_width,
    transformed,
    validate,
)
from .blaschke import (
    BlaschkeMove,
    DescentTrace,
    apply_move,
    area_derivative,
    descend,
    detect_structure,
    first_order_coefficients,
    is_feasible,
    lemma_gap,
)
from .solver import (
    ExtremeConfig,
    OptimalShapeReport,
    area_table,
    continuity_scan,
    extreme_config,
    m_range,
    multi_cluster_area,
    sample_cluster_vectors,
    scan_concavity,
    solve,
)
from .render import RenderSpec, render_svg

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
