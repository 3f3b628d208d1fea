"""Inscribed polygons on closed curves, numerically.

Squares, special quadrilaterals, equilateral triangles, edge-regular n-gons,
prescribed-ratio rectangles, planar rhombi on knots, and regular octahedra on
scaled spheres, found by Gauss-Newton multistart and pseudo-arclength
continuation of the corresponding residual systems.
"""

from .circle import arc, circle_dist, wrap
from .corpus import corpus, corpus_list
from .counting import (
    CountReport,
    classify_rectangle_components,
    count_special_quads,
    count_squares,
    orientation_check,
)
from .curves import (
    ClosedCurve,
    EmbeddedSphere,
    FourierCurve,
    PolylineCurve,
    chord,
    curve_from_spec,
    self_intersects,
    signed_area,
)
from .errors import (
    BoundaryExitError,
    ConvergenceError,
    DegenerateConfigurationError,
    DomainError,
    NonIsolatedSolutionsError,
    PegfinderError,
    SearchFailure,
    UnknownCorpusError,
)
from .fields import ChordalField, DistanceField, SyntheticField, field_from_curve, field_from_spec
from .polygons import (
    PolygonParam,
    StarParam,
    boundary_distance,
    canonical,
    cyclic_shift,
    from_star,
    from_vertices,
    orbit_dist,
    to_star,
    vertices,
)
from .residuals import (
    EdgeRatioSystem,
    OctahedronSystem,
    ParallelogramSystem,
    RectangleSystem,
    ResidualSystem,
    Rhombus3dSystem,
    SpecialQuadPathSystem,
    SpecialQuadSliceSystem,
    SquareSystem,
    TriangleSystem,
    edge_diag_map,
    edge_ratio_residual,
    octahedron_group,
    octahedron_residual,
    parallelogram_residual,
    planarity_angle,
    rectangle_residual,
    rhombus3d_residual,
    special_quad_residual,
    square_residual,
    triangle_residual,
)
from .searches import (
    edge_ratio_branches,
    find_equilateral_triangle,
    find_octahedra,
    find_planar_rhombus,
    find_rectangle,
    find_square,
    find_two_metric_triangle,
    winding_sum,
)
from .solvers import gauss_newton_batch, refine
from .tracing import Branch, Event, TraceSettings, isotropy, trace_branch, winding_number

__version__ = "0.1.0"
