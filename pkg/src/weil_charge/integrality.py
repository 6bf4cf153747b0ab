"""Evaluation of the quantization identities and their boundary terms.

Three residuals are checked, depending on the mesh topology:

* closed surface:    flux - 2*pi*g
* bordered surface:  flux - [2*pi*(-l + g) + holonomy]
* corner form:       flux - [2*pi*g - corner_deficit - geodesic_turning]

with g the census charge, l the total boundary phase winding, holonomy the
loop sum of connection edge integrals, and the last two terms the discrete
geodesic-curvature integral and the corner-angle deficits.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .census import TWO_PI, edge_angle_step, loop_winding, run_census, wrap_angle
from .errors import DegenerateEdge, MissingFaceData, NotTangent

IDENTITY_TOL = 1e-8
TANGENCY_TOL = 1e-6
CORNER_TOL_FACTOR = 10.0  # x (max face diameter)^2 x (loop length), curved case


@dataclass
class BoundaryTrace:
    """Boundary terms for one loop."""

    loop: int
    winding: int = 0
    holonomy: float = 0.0
    geodesic_turning: float = 0.0
    corner_deficit: float = 0.0
    large_corner_step: bool = False  # some boundary phase step exceeded pi/2

    def to_dict(self):
        return {
            "loop": self.loop,
            "winding": self.winding,
            "holonomy": self.holonomy,
            "geodesic_turning": self.geodesic_turning,
            "corner_deficit": self.corner_deficit,
            "large_corner_step": self.large_corner_step,
        }


@dataclass
class IntegralityReport:
    """Terms, residual, and verdict of one quantization identity."""

    identity: str
    total_flux: float
    census: object
    traces: list = field(default_factory=list)
    terms: dict = field(default_factory=dict)
    residual: float = 0.0
    tolerance: float = IDENTITY_TOL
    passed: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "identity": self.identity,
            "total_flux": self.total_flux,
            "flux_over_h": self.total_flux / TWO_PI,
            "census": self.census.to_dict(),
            "boundary": [t.to_dict() for t in self.traces],
            "terms": dict(self.terms),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "notes": list(self.notes),
        }


def total_flux(mesh, twoform):
    """Sum of the face integrals omega_f."""
    if twoform.num_faces != mesh.num_faces:
        raise MissingFaceData("two-form length does not match the face count")
    return math.fsum(twoform.omega)


def boundary_winding(section, loop, chart=1):
    """Integer phase winding l of the section along a boundary loop."""
    return loop_winding(section, loop.edges, chart)


def holonomy(connection, loop):
    """Loop sum of connection edge integrals along the induced orientation."""
    return math.fsum(connection.theta(t, h) for t, h in loop.edges)


def geodesic_terms(mesh, loop):
    """(geodesic_turning, corner_deficit) of one boundary loop.

    The exterior turning angle at each boundary vertex is measured between
    the incoming and outgoing edge directions projected into the tangent
    plane of the vertex normal.  Smooth vertices accumulate into the
    discrete geodesic-curvature integral; declared corners contribute
    pi - alpha_i (equal to their turning angle) to the corner deficit.
    """
    if len(loop) < 3:
        raise DegenerateEdge("boundary loop needs at least 3 edges")
    normals = mesh.vertex_normals()
    p = mesh.vertices
    turning_smooth = []
    turning_corner = []
    m = len(loop.edges)
    for i, (tail, head) in enumerate(loop.edges):
        # turning at `head`, between this edge and the next one
        nxt = loop.edges[(i + 1) % m]
        d_in = p[head] - p[tail]
        d_out = p[nxt[1]] - p[nxt[0]]
        if np.linalg.norm(d_in) == 0 or np.linalg.norm(d_out) == 0:
            raise DegenerateEdge(f"zero-length boundary edge at vertex {head}")
        n = normals[head]
        d_in = d_in - (d_in @ n) * n
        d_out = d_out - (d_out @ n) * n
        angle = math.atan2(float(np.cross(d_in, d_out) @ n), float(d_in @ d_out))
        if head in mesh.corner_vertices:
            turning_corner.append(angle)
        else:
            turning_smooth.append(angle)
    return math.fsum(turning_smooth), math.fsum(turning_corner)


def _base_report(identity, mesh, twoform, section):
    census = run_census(mesh, section)
    return IntegralityReport(
        identity=identity,
        total_flux=total_flux(mesh, twoform),
        census=census,
    )


def check_closed(mesh, twoform, section, tol=IDENTITY_TOL):
    """Closed-surface quantization: flux = 2*pi*g."""
    if not mesh.is_closed():
        raise MissingFaceData("check_closed requires a closed mesh")
    rep = _base_report("closed", mesh, twoform, section)
    g = rep.census.total_charge
    rep.terms = {"flux": rep.total_flux, "two_pi_g": TWO_PI * g}
    rep.residual = rep.total_flux - TWO_PI * g
    rep.tolerance = tol
    integral = abs(rep.total_flux / TWO_PI - round(rep.total_flux / TWO_PI)) < tol
    rep.passed = abs(rep.residual) < tol and g == round(rep.total_flux / TWO_PI)
    if not integral:
        rep.notes.append("flux not integral")
    return rep


def check_bordered(mesh, twoform, section, connection, tol=IDENTITY_TOL):
    """Bordered-surface identity: flux = 2*pi*(-l + g) + holonomy."""
    if mesh.is_closed():
        return check_closed(mesh, twoform, section, tol)
    rep = _base_report("bordered", mesh, twoform, section)
    g = rep.census.total_charge
    l_total = 0
    hol_total = 0.0
    for i, loop in enumerate(mesh.boundary_loops):
        trace = BoundaryTrace(loop=i)
        trace.winding = boundary_winding(section, loop)
        trace.holonomy = holonomy(connection, loop)
        trace.large_corner_step = _has_large_corner_step(mesh, section, loop)
        rep.traces.append(trace)
        l_total += trace.winding
        hol_total += trace.holonomy
    rep.terms = {
        "flux": rep.total_flux,
        "two_pi_g": TWO_PI * g,
        "minus_two_pi_l": -TWO_PI * l_total,
        "holonomy": hol_total,
    }
    rep.residual = rep.total_flux - (TWO_PI * (-l_total + g) + hol_total)
    rep.tolerance = tol
    rep.passed = abs(rep.residual) < tol
    return rep


def check_corner_form(mesh, twoform, section, tol=None, tangency_tol=TANGENCY_TOL):
    """Piecewise-smooth boundary identity with geodesic and corner terms.

    Requires the section to be tangent to the boundary; tangency is tested
    at every boundary vertex in the mesh's deterministic vertex frames.
    The default tolerance adapts to the discretization error of the
    turning angles on curved geometry.
    """
    if mesh.is_closed():
        raise MissingFaceData("check_corner_form requires a bordered mesh")
    _check_tangency(mesh, section, tangency_tol)
    rep = _base_report("corner", mesh, twoform, section)
    g = rep.census.total_charge
    turning_total = 0.0
    deficit_total = 0.0
    length_total = 0.0
    for i, loop in enumerate(mesh.boundary_loops):
        turning, deficit = geodesic_terms(mesh, loop)
        trace = BoundaryTrace(
            loop=i, geodesic_turning=turning, corner_deficit=deficit
        )
        trace.winding = boundary_winding(section, loop)
        trace.large_corner_step = _has_large_corner_step(mesh, section, loop)
        rep.traces.append(trace)
        turning_total += turning
        deficit_total += deficit
        length_total += math.fsum(
            np.linalg.norm(mesh.vertices[h] - mesh.vertices[t]) for t, h in loop.edges
        )
    if tol is None:
        h = mesh.max_face_diameter()
        tol = max(IDENTITY_TOL, CORNER_TOL_FACTOR * h * h * length_total)
    rep.terms = {
        "flux": rep.total_flux,
        "two_pi_g": TWO_PI * g,
        "minus_corner_deficit": -deficit_total,
        "minus_geodesic_turning": -turning_total,
    }
    rep.residual = rep.total_flux - (TWO_PI * g - deficit_total - turning_total)
    rep.tolerance = tol
    rep.passed = abs(rep.residual) < tol
    return rep


def _has_large_corner_step(mesh, section, loop):
    for t, h in loop.edges:
        if t in mesh.corner_vertices or h in mesh.corner_vertices:
            if abs(edge_angle_step(section, (t, h))) > math.pi / 2:
                return True
    return False


def boundary_tangents(mesh, loop):
    """Unit bisector tangent per loop vertex, projected to the tangent plane.

    At each boundary vertex the tangent is the normalized sum of the
    incoming and outgoing edge directions; this is the direction the
    tangency test (and the tangent-field generators) use.
    """
    p = mesh.vertices
    normals = mesh.vertex_normals()
    tangents = {}
    m = len(loop.edges)
    for i, (tail, head) in enumerate(loop.edges):
        nxt = loop.edges[(i + 1) % m]
        d_in = p[head] - p[tail]
        d_out = p[nxt[1]] - p[nxt[0]]
        d_in = d_in / np.linalg.norm(d_in)
        d_out = d_out / np.linalg.norm(d_out)
        t = d_in + d_out
        n = normals[head]
        t = t - (t @ n) * n
        norm = np.linalg.norm(t)
        if norm == 0:
            raise DegenerateEdge(f"undefined boundary tangent at vertex {head}")
        tangents[head] = t / norm
    return tangents


def _check_tangency(mesh, section, tangency_tol):
    e1, e2 = mesh.vertex_frames()
    normals = mesh.vertex_normals()
    unit = section.unit()
    for loop in mesh.boundary_loops:
        tangents = boundary_tangents(mesh, loop)
        for v, t in tangents.items():
            direction = unit[v, 0] * e1[v] + unit[v, 1] * e2[v]
            in_plane_normal = np.cross(normals[v], t)
            overlap = float(direction @ in_plane_normal)
            if abs(overlap) >= tangency_tol:
                raise NotTangent(v, overlap)
