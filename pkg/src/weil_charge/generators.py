"""Canonical test instances with known charges, fluxes, and windings.

Every instance is exact by construction: face integrals come from
closed-form formulas (spherical excess, uniform cell flux) and chart
potentials are discrete potentials built on a dual spanning tree, so the
identity residuals measure nothing but rounding.

Sections of nontrivial bundles (monopole sphere, flux torus) are stored
per chart: a second sample array plus a per-face chart tag.  A single
global vertex sampling on a closed mesh always has total winding zero, so
nonzero charge requires exactly this chart structure.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .bundle import ChartAtlas
from .errors import UnsupportedParameter
from .fields import ConnectionField, SectionField, TwoFormField, discrete_potential
from .integrality import boundary_tangents
from .mesh import build_mesh

TWO_PI = 2.0 * math.pi

KINDS = (
    "monopole_sphere",
    "flux_torus",
    "disk_vortex",
    "annulus",
    "polygon_tangent",
    "cap_tangent",
    "sphere_minus_cap",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one canonical instance.

    kind : one of KINDS
    n : resolution (>= 3)
    k : charge/winding parameter; for polygon_tangent it is the side count
    scale : two-form scale factor (!= 1 creates integrality violations)
    """

    kind: str
    n: int = 16
    k: int = 1
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedParameter(f"unknown generator kind {self.kind!r}")
        if self.n < 3:
            raise UnsupportedParameter("resolution n must be >= 3")


@dataclass
class Instance:
    """A generated mesh plus whichever fields the kind defines."""

    mesh: object
    section: object = None
    connection: object = None
    twoform: object = None
    atlas: object = None
    meta: dict = field(default_factory=dict)


def generate(spec):
    """Build the instance described by the spec."""
    builders = {
        "monopole_sphere": _monopole_sphere,
        "flux_torus": _flux_torus,
        "disk_vortex": _disk_vortex,
        "annulus": _annulus,
        "polygon_tangent": _polygon_tangent,
        "cap_tangent": _cap_tangent,
        "sphere_minus_cap": _sphere_minus_cap,
    }
    inst = builders[spec.kind](spec)
    inst.meta = {
        "hbar_convention": "hbar=1",
        "generator": {
            "kind": spec.kind,
            "n": spec.n,
            "k": spec.k,
            "scale": spec.scale,
        },
    }
    return inst


# -- mesh builders ------------------------------------------------------------


def _uv_sphere(n, first_row=0, theta_max=math.pi, sectors=None):
    """UV sphere rows [first_row, n]; full sphere when first_row = 0.

    Rings i = 1..n-1 at theta = theta_max*i/n; row r spans rings r..r+1.
    Faces are ordered row by row, oriented outward.
    """
    m = sectors or n
    verts = []
    index = {}
    if first_row == 0:
        index["north"] = len(verts)
        verts.append((0.0, 0.0, 1.0) if theta_max == math.pi else _sph(0.0, 0.0))
    for i in range(max(1, first_row), n):
        th = theta_max * i / n
        for j in range(m):
            index[(i, j)] = len(verts)
            verts.append(_sph(th, TWO_PI * j / m))
    if theta_max == math.pi:
        index["south"] = len(verts)
        verts.append((0.0, 0.0, -1.0))

    faces = []
    rows = []  # row id per face
    if first_row == 0:
        for j in range(m):
            faces.append([index["north"], index[(1, j)], index[(1, (j + 1) % m)]])
            rows.append(0)
    for i in range(max(1, first_row), n - 1):
        for j in range(m):
            a = index[(i, j)]
            b = index[(i, (j + 1) % m)]
            c = index[(i + 1, (j + 1) % m)]
            d = index[(i + 1, j)]
            faces.append([a, d, c])
            rows.append(i)
            faces.append([a, c, b])
            rows.append(i)
    if theta_max == math.pi:
        for j in range(m):
            faces.append(
                [index["south"], index[(n - 1, (j + 1) % m)], index[(n - 1, j)]]
            )
            rows.append(n - 1)
    return np.array(verts), faces, rows, index


def _sph(theta, phi):
    return (
        math.sin(theta) * math.cos(phi),
        math.sin(theta) * math.sin(phi),
        math.cos(theta),
    )


def _disk_mesh(n, radius=1.0, inner=0.0, sectors=None):
    """Flat disk (inner = 0) or annulus mesh in the xy plane, CCW faces."""
    m = sectors or n
    rings = n if inner == 0.0 else max(2, n // 4)
    verts = []
    index = {}
    start_ring = 1 if inner == 0.0 else 0
    if inner == 0.0:
        index["center"] = len(verts)
        verts.append((0.0, 0.0, 0.0))
    for i in range(start_ring, rings + 1):
        r = inner + (radius - inner) * i / rings
        for j in range(m):
            phi = TWO_PI * j / m
            index[(i, j)] = len(verts)
            verts.append((r * math.cos(phi), r * math.sin(phi), 0.0))
    faces = []
    if inner == 0.0:
        for j in range(m):
            faces.append([index["center"], index[(1, j)], index[(1, (j + 1) % m)]])
    for i in range(start_ring, rings):
        for j in range(m):
            a = index[(i, j)]
            b = index[(i, (j + 1) % m)]
            c = index[(i + 1, (j + 1) % m)]
            d = index[(i + 1, j)]
            faces.append([a, c, d])
            faces.append([a, b, c])
    return np.array(verts), faces, index


def spherical_excess(vertices, faces):
    """Exact solid angle (spherical excess) of each face of a unit sphere mesh."""
    p = np.asarray(vertices, float)
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    out = []
    for a, b, c in faces:
        v1, v2, v3 = p[a], p[b], p[c]
        triple = float(np.dot(v1, np.cross(v2, v3)))
        denom = 1.0 + float(v1 @ v2 + v2 @ v3 + v3 @ v1)
        out.append(2.0 * math.atan2(triple, denom))
    return np.array(out)


# -- instance builders --------------------------------------------------------


def _zero_connection(mesh):
    conn = ConnectionField()
    for t, h in mesh.undirected_edges():
        conn.set(t, h, 0.0)
    return conn


def _disk_vortex(spec):
    n, k = spec.n, spec.k
    if n < 8:
        raise UnsupportedParameter("disk_vortex needs n >= 8")
    verts, faces, index = _disk_mesh(n)
    mesh = build_mesh(verts, faces)
    z = mesh.vertices[:, 0] + 1j * mesh.vertices[:, 1]
    zeros = _spread_zero_points(mesh, _ring_faces(mesh, index, n, ring=2), abs(k), z)
    psi_c = _vortex_product(z, zeros, k)
    section = SectionField(np.column_stack([psi_c.real, psi_c.imag]))
    return Instance(
        mesh=mesh,
        section=section,
        connection=_zero_connection(mesh),
        twoform=TwoFormField(np.zeros(mesh.num_faces)),
    )


def _ring_faces(mesh, index, n, ring):
    """Faces of the disk mesh whose vertices all sit on rings ring-1..ring."""
    # disk faces: n fan faces, then 2 per (ring, sector) cell
    m = n
    first = m + 2 * m * (ring - 1)
    return list(range(first, first + 2 * m))


def _spread_zero_points(mesh, candidate_faces, count, z):
    """Barycenters (as complex numbers) of `count` well-separated faces."""
    if count == 0:
        return []
    step = max(1, len(candidate_faces) // count)
    chosen = [candidate_faces[(i * step) % len(candidate_faces)] for i in range(count)]
    return [complex(np.mean(z[mesh.faces[f]])) for f in chosen]


def _vortex_product(z, zeros, k):
    """prod (z - z_j), conjugated for k < 0; constant 1 for k = 0."""
    psi = np.ones(len(z), dtype=complex)
    for zj in zeros:
        psi *= z - zj
    if k < 0:
        psi = np.conj(psi)
    return psi


def _annulus(spec):
    n, k = spec.n, spec.k
    if n <= 2 * abs(k):
        raise UnsupportedParameter("annulus needs n > 2|k| for admissibility")
    verts, faces, _ = _disk_mesh(n, radius=1.0, inner=0.5)
    mesh = build_mesh(verts, faces)
    phi = np.arctan2(mesh.vertices[:, 1], mesh.vertices[:, 0])
    psi_c = np.exp(1j * k * phi)
    section = SectionField(np.column_stack([psi_c.real, psi_c.imag]))
    return Instance(
        mesh=mesh,
        section=section,
        connection=_zero_connection(mesh),
        twoform=TwoFormField(np.zeros(mesh.num_faces)),
    )


def _flux_torus(spec):
    n, k, scale = spec.n, spec.k, spec.scale
    if n <= 2 * abs(k):
        raise UnsupportedParameter("flux_torus needs n > 2|k|")
    big, small = 2.0, 1.0
    verts = []
    for i in range(n):
        u = TWO_PI * i / n
        for j in range(n):
            v = TWO_PI * j / n
            verts.append(
                (
                    (big + small * math.cos(v)) * math.cos(u),
                    (big + small * math.cos(v)) * math.sin(u),
                    small * math.sin(v),
                )
            )

    def vid(i, j):
        return (i % n) * n + (j % n)

    faces = []
    wrap_faces = []
    for i in range(n):
        for j in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            faces.append([a, b, c])
            faces.append([a, c, d])
            if j == n - 1:
                wrap_faces += [len(faces) - 2, len(faces) - 1]
    mesh = build_mesh(verts, faces)

    omega = TwoFormField(np.full(mesh.num_faces, scale * TWO_PI * k / mesh.num_faces))

    # theta-function-like section: product of cylinder vortices at v = pi + dv,
    # glued across the v wrap row by the e^{iku}-type transition (chart 2)
    cell = TWO_PI / n
    zero_v = (n // 2 + 0.6) * cell
    zero_us = [
        (math.floor((TWO_PI * t / max(abs(k), 1) / cell)) + 0.3) * cell
        for t in range(abs(k))
    ]
    log_r = -zero_v  # |c_t| = e^{-zero_v}
    centers = [cmath.exp(1j * u + log_r) for u in zero_us]

    uu = np.array([TWO_PI * (i // n) / n for i in range(n * n)])
    vv = np.array([TWO_PI * (i % n) / n for i in range(n * n)])

    def theta_section(v_values):
        w = np.exp(1j * uu - v_values)
        psi = np.ones(n * n, dtype=complex)
        for c in centers:
            psi *= w - c
        if k < 0:
            psi = np.conj(psi)
        return psi

    psi1 = theta_section(vv)
    v_wrapped = vv.copy()
    v_wrapped[vv == 0.0] = TWO_PI
    psi2 = theta_section(v_wrapped)

    face_chart = np.ones(mesh.num_faces, dtype=int)
    face_chart[wrap_faces] = 2
    section = SectionField(
        np.column_stack([psi1.real, psi1.imag]),
        np.column_stack([psi2.real, psi2.imag]),
        face_chart,
    )
    return Instance(mesh=mesh, section=section, twoform=omega)


def _monopole_sphere(spec):
    n, k, scale = spec.n, spec.k, spec.scale
    if n < 8:
        raise UnsupportedParameter("monopole_sphere needs n >= 8")
    if abs(k) > n // 4:
        raise UnsupportedParameter("monopole_sphere needs |k| <= n/4")
    verts, faces, rows, index = _uv_sphere(n)
    mesh = build_mesh(verts, faces)
    rows = np.array(rows)

    omega0 = 0.5 * k * spherical_excess(mesh.vertices, mesh.faces)
    omega0[-1] = TWO_PI * k - math.fsum(omega0[:-1])
    omega = TwoFormField(scale * omega0)

    # section per chart: psi1 = prod (u - u_j) with u the south-pole
    # stereographic coordinate (conjugated for k < 0), zeros near the north
    # pole; psi2 = psi1 / u^|k| is regular and nonvanishing in the south
    theta_v = np.arccos(np.clip(mesh.vertices[:, 2], -1.0, 1.0))
    phi_v = np.arctan2(mesh.vertices[:, 1], mesh.vertices[:, 0])
    w = np.tan(theta_v / 2.0) * np.exp(1j * phi_v)
    u = w if k >= 0 else np.conj(w)

    host_faces = _row_faces(rows, row=2)
    zeros = _spread_zero_points(mesh, host_faces, abs(k), u)
    psi1 = _product_only(u, zeros)
    south = index["south"]
    north = index["north"]
    psi1[south] = 1.0  # placeholder; south faces evaluate in chart 2

    psi2 = psi1.copy()
    safe = np.arange(len(u)) != north
    psi2[safe] = psi1[safe] / u[safe] ** abs(k)
    psi2[north] = 1.0  # placeholder; north faces evaluate in chart 1
    psi2[south] = 1.0  # limit of psi1/u^|k| as u -> inf

    face_chart = np.where(rows < n // 2, 1, 2)
    section = SectionField(
        np.column_stack([psi1.real, psi1.imag]),
        np.column_stack([psi2.real, psi2.imag]),
        face_chart,
    )

    # two-chart atlas with exact discrete potentials; overlap = two face rows
    chart1 = {f for f in range(mesh.num_faces) if rows[f] <= n // 2}
    chart2 = {f for f in range(mesh.num_faces) if rows[f] >= n // 2 - 1}
    atlas = ChartAtlas(
        mesh=mesh,
        chart1_faces=frozenset(chart1),
        chart2_faces=frozenset(chart2),
        connection1=discrete_potential(mesh, omega.omega, chart1),
        connection2=discrete_potential(mesh, omega.omega, chart2),
        base_vertex=north,
        anchor1=north,
        anchor2=south,
    )
    return Instance(mesh=mesh, section=section, twoform=omega, atlas=atlas)


def _row_faces(rows, row):
    return [int(f) for f in np.nonzero(rows == row)[0]]


def _product_only(u, zeros):
    psi = np.ones(len(u), dtype=complex)
    for zj in zeros:
        psi *= u - zj
    return psi


def _sphere_minus_cap(spec):
    n, k, scale = spec.n, spec.k, spec.scale
    if n < 8:
        raise UnsupportedParameter("sphere_minus_cap needs n >= 8")
    cap_rows = n // 4
    verts, faces, rows, index = _uv_sphere(n, first_row=cap_rows)
    mesh = build_mesh(verts, faces)
    rows = np.array(rows)

    omega = TwoFormField(scale * 0.5 * k * spherical_excess(mesh.vertices, mesh.faces))

    theta_v = np.arccos(np.clip(mesh.vertices[:, 2], -1.0, 1.0))
    phi_v = np.arctan2(mesh.vertices[:, 1], mesh.vertices[:, 0])
    south = index["south"]
    # north-pole stereographic coordinate, regular on the patch except at
    # the south pole vertex, where the section value is taken in the limit
    wp = np.empty(len(verts), dtype=complex)
    safe = np.arange(len(verts)) != south
    wp[safe] = 1.0 / np.tan(theta_v[safe] / 2.0) * np.exp(-1j * phi_v[safe])
    wp[south] = 0.0
    u = wp if k >= 0 else np.conj(wp)

    host_faces = _row_faces(rows, row=max(cap_rows + 1, 3 * n // 4))
    zeros = _spread_zero_points(mesh, host_faces, abs(k), u)
    psi = _product_only(u, zeros)
    section = SectionField(np.column_stack([psi.real, psi.imag]))

    connection = discrete_potential(mesh, omega.omega)
    return Instance(mesh=mesh, section=section, connection=connection, twoform=omega)


def _polygon_tangent(spec):
    n, m = spec.n, spec.k
    if m < 3:
        raise UnsupportedParameter("polygon_tangent needs k (side count) >= 3")
    # boundary polygon with n subdivisions per side, radially scaled rings
    boundary = []
    corners_j = []
    for s in range(m):
        a = cmath.exp(1j * TWO_PI * s / m)
        b = cmath.exp(1j * TWO_PI * (s + 1) / m)
        corners_j.append(len(boundary))
        for t in range(n):
            boundary.append(a + (b - a) * t / n)
    bcount = len(boundary)

    verts = [(0.0, 0.0, 0.0)]
    index = {}
    for i in range(1, n + 1):
        for j, zb in enumerate(boundary):
            z = zb * i / n
            index[(i, j)] = len(verts)
            verts.append((z.real, z.imag, 0.0))
    faces = [[0, index[(1, j)], index[(1, (j + 1) % bcount)]] for j in range(bcount)]
    for i in range(1, n):
        for j in range(bcount):
            a = index[(i, j)]
            b = index[(i, (j + 1) % bcount)]
            c = index[(i + 1, (j + 1) % bcount)]
            d = index[(i + 1, j)]
            faces.append([a, c, d])
            faces.append([a, b, c])
    corner_ids = [index[(n, j)] for j in corners_j]
    mesh = build_mesh(np.array(verts), faces, corner_ids)

    z = mesh.vertices[:, 0] + 1j * mesh.vertices[:, 1]
    center = complex(np.mean(z[mesh.faces[0]]))  # vortex host: a central fan face
    psi = 1j * (z - center)
    psi = _override_boundary_tangent(mesh, np.column_stack([psi.real, psi.imag]))
    return Instance(
        mesh=mesh,
        section=SectionField(psi),
        connection=_zero_connection(mesh),
        twoform=TwoFormField(np.zeros(mesh.num_faces)),
    )


def _override_boundary_tangent(mesh, psi):
    """Replace boundary samples by exact bisector tangents in the mesh frames."""
    e1, e2 = mesh.vertex_frames()
    psi = psi.copy()
    for loop in mesh.boundary_loops:
        for v, t in boundary_tangents(mesh, loop).items():
            psi[v] = (float(t @ e1[v]), float(t @ e2[v]))
    return psi


def _cap_tangent(spec):
    n, scale = spec.n, spec.scale
    theta0 = math.pi / 3.0
    sectors = 3 * n
    verts, faces, rows, index = _uv_sphere(n, theta_max=theta0, sectors=sectors)
    mesh = build_mesh(verts, faces)

    omega = TwoFormField(scale * spherical_excess(mesh.vertices, mesh.faces))

    # boundary-tangent direction field with one zero between rings 1 and 2
    q = np.array(_sph(1.4 * theta0 / n, (0.3) * TWO_PI / sectors))
    c = np.cross([0.0, 0.0, 1.0], q)
    p = mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True)
    az = np.cross(np.tile([0.0, 0.0, 1.0], (len(p), 1)), p)
    c_tan = c - (p @ c)[:, None] * p
    u3 = az - c_tan
    e1, e2 = mesh.vertex_frames()
    psi = np.column_stack([np.sum(u3 * e1, axis=1), np.sum(u3 * e2, axis=1)])
    psi = _override_boundary_tangent(mesh, psi)
    return Instance(
        mesh=mesh,
        section=SectionField(psi),
        connection=discrete_potential(mesh, omega.omega),
        twoform=omega,
    )
