"""Sampled geometric fields: section, connection 1-form, and two-form.

Conventions (fixed once, used everywhere):

* hbar = 1 internally; fluxes in units of h = 2*pi are printed by the
  report layer only.
* Section samples are complex values per vertex stored as real pairs.
  An optional second sample array plus a per-face chart tag supports
  sections of nontrivial bundles: each face evaluates its winding in a
  single chart, and chart mismatch across the seam is exactly what makes
  a nonzero total charge possible on a closed mesh.
* Connection samples are edge integrals theta_e, antisymmetric under
  edge reversal and stored once per undirected edge.
* Two-form samples are face integrals omega_f, aligned with the face
  list and signed by the face orientation.
"""

import math
from collections import deque

import numpy as np

from .errors import FieldError, MissingEdgeData, MissingFaceData, ZeroOnVertex

ZERO_TOL = 1e-12  # relative to the field's max norm


class SectionField:
    """Per-vertex complex section samples psi = (psi1, psi2).

    Parameters
    ----------
    psi : (V, 2) array
        Primary (chart-1) samples.
    psi_alt : (V, 2) array, optional
        Chart-2 samples for sections of nontrivial bundles.
    face_chart : (F,) int array, optional
        Chart (1 or 2) each face evaluates in; defaults to all 1.
    """

    def __init__(self, psi, psi_alt=None, face_chart=None):
        self.psi = np.asarray(psi, dtype=float)
        if self.psi.ndim != 2 or self.psi.shape[1] != 2:
            raise FieldError("section samples must be a (V, 2) real array")
        self.psi_alt = None if psi_alt is None else np.asarray(psi_alt, dtype=float)
        if self.psi_alt is not None and self.psi_alt.shape != self.psi.shape:
            raise FieldError("chart-2 samples must match the primary shape")
        self.face_chart = None if face_chart is None else np.asarray(face_chart, int)
        if self.face_chart is not None and not np.isin(self.face_chart, (1, 2)).all():
            raise FieldError("face_chart entries must be 1 or 2")
        self._validate(self.psi)
        if self.psi_alt is not None:
            self._validate(self.psi_alt)
        self._alpha_cache = {}

    @staticmethod
    def _validate(psi):
        norms = np.hypot(psi[:, 0], psi[:, 1])
        tol = ZERO_TOL * norms.max() if norms.size else 0.0
        bad = np.nonzero(norms <= tol)[0]
        if bad.size:
            raise ZeroOnVertex(int(bad[0]), float(norms[bad[0]]))

    @property
    def num_vertices(self):
        return len(self.psi)

    def norms(self, chart=1):
        psi = self.samples(chart)
        return np.hypot(psi[:, 0], psi[:, 1])

    def samples(self, chart=1):
        if chart == 1 or self.psi_alt is None:
            return self.psi
        return self.psi_alt

    def unit(self, chart=1):
        psi = self.samples(chart)
        return psi / self.norms(chart)[:, None]

    def alpha(self, chart=1):
        """Principal-branch phase angle per vertex, in (-pi, pi]."""
        key = 1 if (chart == 1 or self.psi_alt is None) else 2
        cached = self._alpha_cache.get(key)
        if cached is None:
            psi = self.samples(chart)
            cached = np.arctan2(psi[:, 1], psi[:, 0])
            self._alpha_cache[key] = cached
        return cached

    def chart_of_face(self, f):
        if self.face_chart is None:
            return 1
        return int(self.face_chart[f])

    def conjugated(self):
        """psi2 -> -psi2 on every sample (negates all windings)."""
        flip = np.array([1.0, -1.0])
        return SectionField(
            self.psi * flip,
            None if self.psi_alt is None else self.psi_alt * flip,
            self.face_chart,
        )

    def rescaled(self, factors):
        """Multiply samples by a positive per-vertex amplitude field."""
        factors = np.asarray(factors, dtype=float)[:, None]
        if (factors <= 0).any():
            raise FieldError("amplitude factors must be positive")
        return SectionField(
            self.psi * factors,
            None if self.psi_alt is None else self.psi_alt * factors,
            self.face_chart,
        )


class ConnectionField:
    """Edge integrals theta_e of the connection 1-form.

    Stored once per undirected edge with the sign of the (min, max)
    direction; reads apply the antisymmetry.
    """

    def __init__(self, values=None):
        self._theta = {}
        if values:
            for (t, h), val in values.items() if isinstance(values, dict) else values:
                self.set(int(t), int(h), float(val))

    def set(self, tail, head, value):
        if tail == head:
            raise FieldError(f"degenerate edge ({tail}, {head})")
        if tail < head:
            self._theta[(tail, head)] = value
        else:
            self._theta[(head, tail)] = -value

    def has(self, tail, head):
        return (min(tail, head), max(tail, head)) in self._theta

    def theta(self, tail, head):
        key = (min(tail, head), max(tail, head))
        try:
            val = self._theta[key]
        except KeyError:
            raise MissingEdgeData((tail, head)) from None
        return val if tail < head else -val

    def items(self):
        """Canonical (tail < head) edge/value pairs."""
        return sorted(self._theta.items())

    def __len__(self):
        return len(self._theta)

    def copy(self):
        c = ConnectionField()
        c._theta = dict(self._theta)
        return c


class TwoFormField:
    """Face integrals omega_f, aligned with the mesh face list."""

    def __init__(self, omega):
        self.omega = np.asarray(omega, dtype=float)
        if self.omega.ndim != 1:
            raise MissingFaceData("two-form samples must be a flat per-face array")

    @property
    def num_faces(self):
        return len(self.omega)

    def scaled(self, factor):
        return TwoFormField(self.omega * factor)

    def reversed(self):
        """Sign flip under face orientation reversal."""
        return TwoFormField(-self.omega)


def unit_field(section):
    """Normalized field and principal phase per vertex.

    Returns (n, alpha) with n of shape (V, 2), ||n|| = 1, and
    alpha = atan2(n2, n1) in (-pi, pi].
    """
    return section.unit(), section.alpha()


def gauge_transform(section, connection, lam):
    """Apply the gauge phase lam (one real per vertex).

    psi' = exp(i lam) psi on every chart; theta' = theta + lam_head - lam_tail.
    Every identity residual downstream is unchanged for single-valued lam.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (section.num_vertices,):
        raise FieldError("lam must supply one phase per vertex")
    cos, sin = np.cos(lam), np.sin(lam)

    def rotate(psi):
        return np.column_stack(
            [psi[:, 0] * cos - psi[:, 1] * sin, psi[:, 0] * sin + psi[:, 1] * cos]
        )

    new_section = SectionField(
        rotate(section.psi),
        None if section.psi_alt is None else rotate(section.psi_alt),
        section.face_chart,
    )
    new_conn = ConnectionField()
    for (t, h), val in connection.items():
        new_conn.set(t, h, val + lam[h] - lam[t])
    return new_section, new_conn


def exactness_residual(mesh, connection, twoform):
    """Per-face residual r_f = omega_f - sum of theta over the face boundary.

    Near zero exactly where the connection is a discrete potential for the
    two-form.  Raises MissingEdgeData if any face edge has no sample.
    """
    if twoform.num_faces != mesh.num_faces:
        raise MissingFaceData("two-form length does not match the face count")
    res = np.empty(mesh.num_faces)
    for f in range(mesh.num_faces):
        circ = math.fsum(connection.theta(t, h) for t, h in mesh.face_edges(f))
        res[f] = twoform.omega[f] - circ
    return res


def discrete_potential(mesh, omega, face_ids=None):
    """Exact discrete potential theta for the two-form on a face subset.

    Builds a spanning tree of the dual graph rooted at the outer region and
    assigns each face's equation to the edge toward its dual parent, so
    sum of theta over every face boundary equals omega_f to rounding.
    The subset must not be the whole of a closed mesh (no potential exists
    when the total flux is nonzero); with an outer region present the
    construction always succeeds.
    """
    omega = np.asarray(omega, dtype=float)
    if face_ids is None:
        face_ids = range(mesh.num_faces)
    face_set = set(int(f) for f in face_ids)
    if mesh.is_closed() and len(face_set) == mesh.num_faces:
        raise MissingEdgeData(("global", "potential"))

    # dual adjacency within the subset, plus which faces touch the outside
    directed = mesh.directed_edges()
    theta = ConnectionField()
    for f in face_set:
        for t, h in mesh.face_edges(f):
            theta.set(t, h, 0.0)

    neighbors = {f: [] for f in face_set}
    outer = []
    for f in face_set:
        touches_outside = False
        for t, h in mesh.face_edges(f):
            g = directed.get((h, t))
            if g is not None and g in face_set:
                neighbors[f].append((g, (t, h)))
            else:
                touches_outside = True
        if touches_outside:
            outer.append(f)
    if not outer:
        raise MissingEdgeData(("subset", "interior"))

    # BFS from the outer region; parent_edge[f] is the directed edge of f
    # shared with its parent (or with the outside for roots).
    parent_edge = {}
    order = []
    seen = set()
    queue = deque()
    for f in sorted(outer):
        if f in seen:
            continue
        seen.add(f)
        for t, h in mesh.face_edges(f):
            g = directed.get((h, t))
            if g is None or g not in face_set:
                parent_edge[f] = (t, h)
                break
        queue.append(f)
        while queue:
            u = queue.popleft()
            order.append(u)
            for g, edge in neighbors[u]:
                if g in seen:
                    continue
                seen.add(g)
                # g's copy of the shared edge is the reverse of u's copy
                parent_edge[g] = (edge[1], edge[0])
                queue.append(g)
    if len(order) != len(face_set):
        raise MissingEdgeData(("subset", "disconnected"))

    # leaves first: each face fixes its parent edge to absorb its residual
    for f in reversed(order):
        t, h = parent_edge[f]
        circ = math.fsum(theta.theta(a, b) for a, b in mesh.face_edges(f))
        theta.set(t, h, theta.theta(t, h) + (omega[f] - circ))
    return theta
