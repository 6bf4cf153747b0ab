"""Numerical verification of the generalized Weil integrality condition
on discretized 2-surfaces with boundary."""

from .bundle import (
    ChartAtlas,
    Obstruction,
    TransitionFunction,
    propagate_transition,
    section_in_chart,
    verify_cocycle_relation,
)
from .census import (
    Vortex,
    VortexCensus,
    brouwer_degree_from_jacobian,
    edge_angle_step,
    face_winding,
    run_census,
)
from .fields import (
    ConnectionField,
    SectionField,
    TwoFormField,
    discrete_potential,
    exactness_residual,
    gauge_transform,
    unit_field,
)
from .generators import GeneratorSpec, Instance, generate
from .integrality import (
    BoundaryTrace,
    IntegralityReport,
    boundary_winding,
    check_bordered,
    check_closed,
    check_corner_form,
    geodesic_terms,
    holonomy,
    total_flux,
)
from .mesh import (
    BoundaryLoop,
    SurfaceMesh,
    boundary_loops,
    build_mesh,
    euler_characteristic,
    subdivide,
)

__version__ = "0.1.0"
