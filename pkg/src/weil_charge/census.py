"""Vortex census: locate section zeros by per-face winding numbers.

Each isolated zero of the (linearly interpolated) section shows up as a
face whose boundary phase winding is nonzero.  The winding is the signed
zero count the continuum topological current assigns to the face; its
absolute value is the Hopf index and its sign the Brouwer degree.  For a
simple zero the degree is cross-validated against the sign of the fitted
section Jacobian.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AngleStepPi,
    DegenerateJacobian,
    InconsistentVortexData,
    WindingNotInteger,
)

ANGLE_MARGIN = 1e-6  # rad below pi at which an edge step is rejected
WINDING_ROUND_TOL = 1e-6
JAC_TOL = 1e-10  # relative to (max |psi| / face diameter)^2

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Principal value of an angle difference, in [-pi, pi]."""
    return math.remainder(a, TWO_PI)


@dataclass(frozen=True)
class Vortex:
    """One located zero (or unresolved zero cluster) of the section."""

    face: int
    position: tuple
    winding: int
    hopf_index: int
    brouwer_degree: int

    def __post_init__(self):
        assert self.winding == self.hopf_index * self.brouwer_degree
        assert self.winding != 0


@dataclass
class VortexCensus:
    """All located vortices plus the admissibility diagnostic."""

    vortices: list = field(default_factory=list)
    total_charge: int = 0
    max_angle_step: float = 0.0

    def to_dict(self):
        return {
            "total_charge": self.total_charge,
            "max_angle_step": self.max_angle_step,
            "vortices": [
                {
                    "face": v.face,
                    "position": list(v.position),
                    "winding": v.winding,
                    "hopf_index": v.hopf_index,
                    "brouwer_degree": v.brouwer_degree,
                }
                for v in self.vortices
            ],
        }


def edge_angle_step(section, edge, chart=1, face=None):
    """Principal phase step along a directed edge, in (-pi, pi).

    Raises AngleStepPi when the step is within ANGLE_MARGIN of pi, which
    signals a zero on or near the edge (mesh refinement required).
    """
    tail, head = edge
    alpha = section.alpha(chart)
    step = wrap_angle(alpha[head] - alpha[tail])
    if abs(step) >= math.pi - ANGLE_MARGIN:
        raise AngleStepPi(edge, step, face)
    return step


def loop_winding(section, edges, chart=1):
    """Integer winding of the section phase along a closed edge path."""
    steps = [edge_angle_step(section, e, chart) for e in edges]
    return _round_winding(math.fsum(steps) / TWO_PI, where=f"along loop {edges[0]}..")


def _round_winding(w, where=""):
    r = round(w)
    if abs(w - r) >= WINDING_ROUND_TOL:
        raise WindingNotInteger(w, where)
    return int(r)


def face_winding(mesh, section, f):
    """Winding number of the section around one face boundary.

    Equals the winding of the closed 3-segment polygon of vertex values,
    i.e. the brute-force winding of the edge-interpolated section.
    """
    chart = section.chart_of_face(f)
    steps = [edge_angle_step(section, e, chart, face=f) for e in mesh.face_edges(f)]
    return _round_winding(math.fsum(steps) / TWO_PI, where=f"on face {f}")


def _face_plane_coords(mesh, f):
    """Right-handed 2D coordinates of the face vertices in the face plane."""
    p = mesh.vertices[mesh.faces[f]]
    e1 = p[1] - p[0]
    e1 = e1 / np.linalg.norm(e1)
    n = np.cross(p[1] - p[0], p[2] - p[0])
    n = n / np.linalg.norm(n)
    e2 = np.cross(n, e1)
    rel = p - p[0]
    return np.column_stack([rel @ e1, rel @ e2])


def section_jacobian(points, values):
    """Least-squares affine fit of the section; returns the 2x2 Jacobian.

    points : (m, 2) sample positions, values : (m, 2) section samples.
    """
    points = np.asarray(points, float)
    values = np.asarray(values, float)
    a = np.column_stack([points, np.ones(len(points))])
    coef, *_ = np.linalg.lstsq(a, values, rcond=None)
    return coef[:2].T  # rows: d(psi1)/dx..., d(psi2)/dx...


def brouwer_degree_from_jacobian(jacobian, jac_tol):
    """Sign of det J at a zero, or DegenerateJacobian below tolerance."""
    det = float(np.linalg.det(jacobian))
    if abs(det) <= jac_tol:
        raise DegenerateJacobian(f"|det J| = {abs(det):g} <= {jac_tol:g}")
    return 1 if det > 0 else -1


def _face_windings(mesh, section, faces):
    out = []
    for f in faces:
        chart = section.chart_of_face(f)
        alpha = section.alpha(chart)
        steps = []
        for t, h in mesh.face_edges(f):
            s = wrap_angle(alpha[h] - alpha[t])
            if abs(s) >= math.pi - ANGLE_MARGIN:
                raise AngleStepPi((t, h), s, f)
            steps.append(s)
        out.append((f, _round_winding(math.fsum(steps) / TWO_PI, where=f"on face {f}"),
                    max(abs(s) for s in steps)))
    return out


def run_census(mesh, section, threads=None):
    """Census of all faces: vortex list (sorted by face id) and total charge.

    For each winding +-1 face the Brouwer degree is cross-validated against
    the Jacobian sign fitted on the host face; disagreement on a clearly
    non-degenerate Jacobian raises InconsistentVortexData.
    """
    if threads is None:
        threads = int(os.environ.get("WEIL_CHARGE_THREADS", "1") or 1)
    faces = list(range(mesh.num_faces))
    if threads > 1 and len(faces) > threads:
        chunks = [faces[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(lambda ch: _face_windings(mesh, section, ch), chunks)
        results = sorted(r for part in parts for r in part)
    else:
        results = _face_windings(mesh, section, faces)

    vortices = []
    total = 0
    max_step = 0.0
    for f, w, step in results:
        max_step = max(max_step, step)
        if w == 0:
            continue
        total += w
        eta = 1 if w > 0 else -1
        if abs(w) == 1:
            eta = _cross_validate_degree(mesh, section, f, eta)
        vortices.append(
            Vortex(
                face=f,
                position=tuple(mesh.face_barycenter(f)),
                winding=w,
                hopf_index=abs(w),
                brouwer_degree=eta,
            )
        )
    return VortexCensus(vortices=vortices, total_charge=total, max_angle_step=max_step)


def _cross_validate_degree(mesh, section, f, eta):
    chart = section.chart_of_face(f)
    points = _face_plane_coords(mesh, f)
    values = section.samples(chart)[mesh.faces[f]]
    diam = max(np.linalg.norm(points[i] - points[j]) for i, j in ((0, 1), (1, 2), (0, 2)))
    scale = np.hypot(values[:, 0], values[:, 1]).max()
    jac_tol = JAC_TOL * (scale / diam) ** 2
    try:
        jac_eta = brouwer_degree_from_jacobian(section_jacobian(points, values), jac_tol)
    except DegenerateJacobian:
        return eta  # degree reported from the winding only
    if jac_eta != eta:
        raise InconsistentVortexData(
            f"face {f}: winding sign {eta} but Jacobian sign {jac_eta}"
        )
    return eta
