import math

import numpy as np
import pytest

from weil_charge.census import (
    edge_angle_step,
    face_winding,
    loop_winding,
    run_census,
    section_jacobian,
    brouwer_degree_from_jacobian,
    wrap_angle,
)
from weil_charge.errors import AngleStepPi, DegenerateJacobian
from weil_charge.fields import SectionField
from weil_charge.generators import GeneratorSpec, generate
from weil_charge.mesh import build_mesh


def dense_polygon_winding(values, steps=1000):
    """Brute-force winding of the closed polygon of complex values.

    Interpolates each side linearly with `steps` substeps and accumulates
    principal-branch phase differences; the reference oracle for
    face_winding.
    """
    total = 0.0
    m = len(values)
    prev = values[0]
    for i in range(m):
        a, b = values[i], values[(i + 1) % m]
        for s in range(1, steps + 1):
            cur = a + (b - a) * (s / steps)
            total += wrap_angle(math.atan2(cur.imag, cur.real)
                                - math.atan2(prev.imag, prev.real))
            prev = cur
    return total / (2.0 * math.pi)


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def triangle_mesh(points):
    points = np.asarray(points, float)
    if _cross2(points[1] - points[0], points[2] - points[0]) < 0:
        points = points[::-1]
    return build_mesh(points, [(0, 1, 2)])


def linear_section(mesh, a):
    xy = mesh.vertices[:, :2]
    return SectionField(xy @ a.T)


def _origin_inside(points):
    signs = []
    for i in range(3):
        p, q = points[i], points[(i + 1) % 3]
        signs.append(_cross2(q - p, -p))
    return all(s > 0 for s in signs) or all(s < 0 for s in signs)


def test_face_winding_matches_dense_oracle_linear_fields():
    rng = np.random.default_rng(42)
    checked_inside = 0
    trials = 0
    while trials < 200:
        a = rng.uniform(-2, 2, (2, 2))
        if abs(np.linalg.det(a)) < 0.1:
            continue
        points = rng.uniform(-1, 1, (3, 2))
        # reject triangles whose edges pass too close to the zero at the
        # origin (winding undefined at the discretization level)
        too_close = False
        for i in range(3):
            p, q = points[i], points[(i + 1) % 3]
            d = q - p
            t = np.clip(-(p @ d) / (d @ d), 0.0, 1.0)
            if np.linalg.norm(p + t * d) < 0.08:
                too_close = True
        if too_close or min(np.linalg.norm(points, axis=1)) < 0.08:
            continue
        trials += 1
        mesh = triangle_mesh(points)
        section = linear_section(mesh, a)
        w = face_winding(mesh, section, 0)
        values = [complex(*section.psi[v]) for v in mesh.faces[0]]
        dense = dense_polygon_winding(values)
        assert w == round(dense)
        assert abs(dense - round(dense)) < 1e-6
        assert w in (-1, 0, 1)
        if _origin_inside(mesh.vertices[:, :2]):
            checked_inside += 1
            assert w == (1 if np.linalg.det(a) > 0 else -1)
        else:
            assert w == 0
    assert checked_inside >= 20  # the enclosure branch was actually exercised


def test_zero_near_edge_raises():
    mesh = build_mesh(np.array([(-1, -1e-8), (1, -1e-8), (0, 1)], float), [(0, 1, 2)])
    section = SectionField(mesh.vertices[:, :2])  # zero sits on edge (0, 1)
    with pytest.raises(AngleStepPi) as err:
        face_winding(mesh, section, 0)
    assert err.value.face == 0


def test_edge_angle_step_sign():
    section = SectionField(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert edge_angle_step(section, (0, 1)) == pytest.approx(math.pi / 2)
    assert edge_angle_step(section, (1, 0)) == pytest.approx(-math.pi / 2)


def test_loop_winding_integer():
    ang = np.linspace(0, 2 * math.pi, 6, endpoint=False)
    section = SectionField(np.column_stack([np.cos(2 * ang), np.sin(2 * ang)]))
    edges = [(i, (i + 1) % 6) for i in range(6)]
    assert loop_winding(section, edges) == 2


def test_census_counts_and_positions():
    inst = generate(GeneratorSpec(kind="disk_vortex", n=24, k=-2))
    census = run_census(inst.mesh, inst.section)
    assert census.total_charge == -2
    assert len(census.vortices) == 2
    for v in census.vortices:
        assert v.winding == -1
        assert v.hopf_index == 1
        assert v.brouwer_degree == -1
        assert v.winding == v.hopf_index * v.brouwer_degree
    assert census.max_angle_step < math.pi


def test_census_threaded_matches_serial(monkeypatch):
    inst = generate(GeneratorSpec(kind="disk_vortex", n=24, k=3))
    serial = run_census(inst.mesh, inst.section).to_dict()
    monkeypatch.setenv("WEIL_CHARGE_THREADS", "4")
    threaded = run_census(inst.mesh, inst.section).to_dict()
    assert serial == threaded
    assert run_census(inst.mesh, inst.section, threads=2).to_dict() == serial


def test_constant_section_empty_census():
    inst = generate(GeneratorSpec(kind="monopole_sphere", n=8, k=0))
    census = run_census(inst.mesh, inst.section)
    assert census.total_charge == 0
    assert census.vortices == []


def test_jacobian_fit_and_degree():
    points = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    a = np.array([[2.0, 1.0], [0.5, 3.0]])
    jac = section_jacobian(points, points @ a.T)
    assert np.allclose(jac, a)
    assert brouwer_degree_from_jacobian(jac, 1e-10) == 1
    flip = a.copy()
    flip[1] *= -1
    assert brouwer_degree_from_jacobian(flip, 1e-10) == -1
    with pytest.raises(DegenerateJacobian):
        brouwer_degree_from_jacobian(np.array([[1.0, 0.0], [2.0, 0.0]]), 1e-10)


def test_winding_invariant_under_rescaling():
    inst = generate(GeneratorSpec(kind="disk_vortex", n=16, k=2))
    rng = np.random.default_rng(7)
    factors = rng.uniform(0.1, 10.0, inst.mesh.num_vertices)
    before = run_census(inst.mesh, inst.section).to_dict()
    after = run_census(inst.mesh, inst.section.rescaled(factors)).to_dict()
    assert before == after
