"""Two-chart line-bundle construction: transition function by path integration.

Given per-chart discrete potentials theta_1, theta_2 of the same two-form,
the transition function on the chart overlap is propagated along a spanning
tree from a reference vertex, c(head) = c(tail) * exp(i (theta1 - theta2)).
Path independence up to 2*pi multiples around the non-contractible overlap
loop is exactly the integrality condition; a fractional loop defect is
returned as an Obstruction instead of a transition function.
"""

import cmath
import math
from collections import deque
from dataclasses import dataclass

from .census import TWO_PI, wrap_angle, _round_winding
from .errors import FieldError, InconsistentAtlas, MissingEdgeData

DEFECT_TOL = 1e-8
EXACTNESS_TOL = 1e-10


@dataclass
class ChartAtlas:
    """Two-chart atlas: face sets, per-chart connections, and anchors.

    chart1_faces and chart2_faces may overlap; their intersection is the
    overlap band.  Each chart's connection must be defined on all edges of
    its faces and be a discrete potential of the instance two-form there.
    """

    mesh: object
    chart1_faces: frozenset
    chart2_faces: frozenset
    connection1: object
    connection2: object
    base_vertex: int = 0
    anchor1: int = 0
    anchor2: int = 0

    def __post_init__(self):
        self.chart1_faces = frozenset(int(f) for f in self.chart1_faces)
        self.chart2_faces = frozenset(int(f) for f in self.chart2_faces)

    @property
    def overlap_faces(self):
        return self.chart1_faces & self.chart2_faces

    def chart_faces(self, chart):
        return self.chart1_faces if chart == 1 else self.chart2_faces

    def connection(self, chart):
        return self.connection1 if chart == 1 else self.connection2

    def chart_vertices(self, chart):
        return {int(v) for f in self.chart_faces(chart) for v in self.mesh.faces[f]}

    def overlap_vertices(self):
        return {int(v) for f in self.overlap_faces for v in self.mesh.faces[f]}

    def overlap_edges(self):
        """Undirected edges of overlap faces, as (min, max) pairs."""
        edges = set()
        for f in self.overlap_faces:
            for t, h in self.mesh.face_edges(f):
                edges.add((min(t, h), max(t, h)))
        return edges

    def validate(self, twoform=None):
        """Check chart coverage, connectivity, simple-connectivity, exactness."""
        mesh = self.mesh
        all_faces = set(range(mesh.num_faces))
        if self.chart1_faces | self.chart2_faces != all_faces:
            raise InconsistentAtlas("charts do not cover every face")
        if not self.overlap_faces:
            raise InconsistentAtlas("overlap band is empty")
        for chart in (1, 2):
            faces = self.chart_faces(chart)
            sub, _, _ = mesh.submesh(faces)
            if sub.euler_characteristic() != 1:
                raise InconsistentAtlas(
                    f"chart {chart} submesh is not a disk "
                    f"(Euler characteristic {sub.euler_characteristic()})"
                )
            if not _edge_connected(mesh, faces):
                raise InconsistentAtlas(f"chart {chart} is not edge-connected")
            if twoform is not None:
                res = _chart_exactness(mesh, self.connection(chart), twoform, faces)
                if res > EXACTNESS_TOL:
                    raise InconsistentAtlas(
                        f"chart {chart} potential is not exact (residual {res:g})"
                    )
        if not _edge_connected(mesh, self.overlap_faces):
            raise InconsistentAtlas("overlap band is not edge-connected")

    def overlap_simply_connected(self):
        sub, _, _ = self.mesh.submesh(self.overlap_faces)
        return sub.euler_characteristic() == 1


def _edge_connected(mesh, faces):
    faces = set(faces)
    if not faces:
        return False
    directed = mesh.directed_edges()
    start = next(iter(faces))
    seen = {start}
    queue = deque([start])
    while queue:
        f = queue.popleft()
        for t, h in mesh.face_edges(f):
            g = directed.get((h, t))
            if g is not None and g in faces and g not in seen:
                seen.add(g)
                queue.append(g)
    return seen == faces


def _chart_exactness(mesh, connection, twoform, faces):
    worst = 0.0
    for f in faces:
        circ = math.fsum(connection.theta(t, h) for t, h in mesh.face_edges(f))
        worst = max(worst, abs(twoform.omega[f] - circ))
    return worst


@dataclass
class TransitionFunction:
    """Unit-modulus transition samples on the overlap vertices."""

    phases: dict  # vertex id -> accumulated phase (radians)
    reference_vertex: int
    loop_defect: float = 0.0

    def value(self, v):
        return cmath.exp(1j * self.phases[v])

    def values(self):
        return {v: self.value(v) for v in self.phases}

    @property
    def winding(self):
        """Loop winding of the transition function (loop defect / 2*pi)."""
        return _round_winding(self.loop_defect / TWO_PI, where="of transition seam")

    def to_dict(self):
        return {
            "reference_vertex": self.reference_vertex,
            "loop_defect": self.loop_defect,
            "winding": self.winding,
            "samples": {
                str(v): [math.cos(p), math.sin(p)]
                for v, p in sorted(self.phases.items())
            },
        }


@dataclass
class Obstruction:
    """Nonintegral loop defect: no single-valued transition function."""

    defect: float
    fractional_part: float

    def to_dict(self):
        return {
            "obstruction": True,
            "loop_defect": self.defect,
            "defect_over_two_pi": self.defect / TWO_PI,
            "fractional_part": self.fractional_part,
        }


def _edge_phase(atlas, tail, head):
    return atlas.connection1.theta(tail, head) - atlas.connection2.theta(tail, head)


def seam_loop(atlas):
    """Closed edge path separating the chart-1-only region, oriented with
    that region on the left.  Returns [] when the overlap is a disk."""
    only1 = atlas.chart1_faces - atlas.overlap_faces
    only2 = atlas.chart2_faces - atlas.overlap_faces
    faces, sign = (only1, 1.0) if only1 else (only2, -1.0)
    if not faces:
        return [], 1.0
    sub, vmap, _ = atlas.mesh.submesh(faces)
    if not sub.boundary_loops:
        return [], 1.0
    inverse = {new: old for old, new in vmap.items()}
    loop = sub.boundary_loops[0]
    return [(inverse[t], inverse[h]) for t, h in loop.edges], sign


def seam_defect(atlas):
    """Total theta1 - theta2 around the seam loop (chart-1 side on the left)."""
    loop, sign = seam_loop(atlas)
    return sign * math.fsum(_edge_phase(atlas, t, h) for t, h in loop)


def propagate_transition(atlas, defect_tol=DEFECT_TOL):
    """Propagate the transition function over the overlap band.

    Returns a TransitionFunction when every propagation mismatch is a
    2*pi multiple (the integral case) and an Obstruction with the seam
    defect otherwise.  A non-multiple mismatch on a simply connected
    overlap signals non-exact chart potentials and raises
    InconsistentAtlas instead.
    """
    vertices = atlas.overlap_vertices()
    edges = atlas.overlap_edges()
    adjacency = {v: [] for v in vertices}
    for t, h in edges:
        adjacency[t].append(h)
        adjacency[h].append(t)

    ref = min(vertices)
    phases = {ref: 0.0}
    queue = deque([ref])
    tree_edges = set()
    while queue:
        v = queue.popleft()
        for w in sorted(adjacency[v]):
            if w in phases:
                continue
            phases[w] = phases[v] + _edge_phase(atlas, v, w)
            tree_edges.add((min(v, w), max(v, w)))
            queue.append(w)
    if set(phases) != vertices:
        raise InconsistentAtlas("overlap band is not vertex-connected")

    worst = 0.0
    for t, h in edges:
        if (t, h) in tree_edges:
            continue
        mismatch = phases[t] + _edge_phase(atlas, t, h) - phases[h]
        worst = max(worst, abs(wrap_angle(mismatch)))
    if worst > defect_tol:
        if atlas.overlap_simply_connected():
            raise InconsistentAtlas(
                f"path-dependent propagation (mismatch {worst:g}) on a simply "
                "connected overlap: chart potentials are not exact"
            )
        defect = seam_defect(atlas)
        frac = defect / TWO_PI - math.floor(defect / TWO_PI + 0.5)
        frac = abs(frac)
        return Obstruction(defect=defect, fractional_part=frac)

    defect = seam_defect(atlas) if not atlas.overlap_simply_connected() else 0.0
    return TransitionFunction(phases=phases, reference_vertex=ref, loop_defect=defect)


def verify_cocycle_relation(transition, atlas):
    """Max residual |c(head)/c(tail) - exp(i (theta1 - theta2))| over overlap edges."""
    worst = 0.0
    for t, h in atlas.overlap_edges():
        lhs = transition.value(h) / transition.value(t)
        rhs = cmath.exp(1j * _edge_phase(atlas, t, h))
        worst = max(worst, abs(lhs - rhs))
    return worst


def section_in_chart(atlas, chart, fiber_values):
    """Materialize a section on one chart by parallel transport from the anchor.

    psi(m) = w(m) * exp(-i * sum of theta along a spanning-tree path from
    the chart anchor), realizing the path-integral trivialization.
    fiber_values maps each chart vertex to a complex number (or supplies a
    full per-vertex array).
    """
    mesh = atlas.mesh
    conn = atlas.connection(chart)
    vertices = atlas.chart_vertices(chart)
    anchor = atlas.anchor1 if chart == 1 else atlas.anchor2
    if anchor not in vertices:
        raise FieldError(f"anchor {anchor} is not a vertex of chart {chart}")

    adjacency = {v: [] for v in vertices}
    for f in atlas.chart_faces(chart):
        for t, h in mesh.face_edges(f):
            adjacency[t].append(h)
            adjacency[h].append(t)

    phase = {anchor: 0.0}
    queue = deque([anchor])
    while queue:
        v = queue.popleft()
        for w in sorted(set(adjacency[v])):
            if w in phase:
                continue
            phase[w] = phase[v] + conn.theta(v, w)
            queue.append(w)
    if set(phase) != vertices:
        raise MissingEdgeData(("chart", chart))

    def fiber(v):
        if isinstance(fiber_values, dict):
            return complex(fiber_values[v])
        return complex(fiber_values[v])

    return {v: fiber(v) * cmath.exp(-1j * phase[v]) for v in sorted(vertices)}
