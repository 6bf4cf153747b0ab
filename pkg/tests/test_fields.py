import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weil_charge.census import wrap_angle
from weil_charge.errors import FieldError, MissingEdgeData, ZeroOnVertex
from weil_charge.fields import (
    ConnectionField,
    SectionField,
    TwoFormField,
    discrete_potential,
    exactness_residual,
    gauge_transform,
    unit_field,
)
from weil_charge.generators import GeneratorSpec, generate
from weil_charge.mesh import build_mesh


def square_pair():
    verts = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], float)
    return build_mesh(verts, [(0, 1, 2), (0, 2, 3)])


def test_section_rejects_zero_on_vertex():
    psi = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ZeroOnVertex) as err:
        SectionField(psi)
    assert err.value.vertex == 1


def test_section_zero_tolerance_is_relative():
    psi = np.array([[1e-300, 0.0], [0.0, 2e-300], [1e-300, 1e-300]])
    field = SectionField(psi)  # tiny but nonzero relative to the max norm
    assert field.num_vertices == 3


def test_unit_field_and_alpha():
    psi = np.array([[3.0, 4.0], [0.0, -2.0]])
    field = SectionField(psi)
    n, alpha = unit_field(field)
    assert np.allclose(np.hypot(n[:, 0], n[:, 1]), 1.0)
    assert alpha[0] == pytest.approx(math.atan2(4, 3))
    assert alpha[1] == pytest.approx(-math.pi / 2)


def test_conjugated_negates_phase():
    psi = np.array([[1.0, 1.0], [2.0, -3.0]])
    field = SectionField(psi)
    assert np.allclose(field.conjugated().alpha(), -field.alpha())


def test_rescaled_requires_positive_factors():
    field = SectionField(np.array([[1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(FieldError):
        field.rescaled([1.0, -1.0])


def test_connection_antisymmetry():
    conn = ConnectionField()
    conn.set(3, 1, 0.25)
    assert conn.theta(3, 1) == 0.25
    assert conn.theta(1, 3) == -0.25
    assert conn.items() == [((1, 3), -0.25)]
    with pytest.raises(MissingEdgeData):
        conn.theta(0, 1)
    with pytest.raises(FieldError):
        conn.set(2, 2, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_connection_set_read_roundtrip(a, b):
    conn = ConnectionField()
    conn.set(0, 1, a)
    conn.set(5, 2, b)
    assert conn.theta(0, 1) == a
    assert conn.theta(1, 0) == -a
    assert conn.theta(5, 2) == b
    assert conn.theta(2, 5) == -b


@settings(max_examples=100, deadline=None)
@given(st.floats(-100.0, 100.0))
def test_wrap_angle_principal_value(a):
    w = wrap_angle(a)
    assert -math.pi <= w <= math.pi
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)


def test_gauge_transform_preserves_face_circulation():
    mesh = square_pair()
    section = SectionField(np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], float))
    conn = ConnectionField()
    for t, h in mesh.undirected_edges():
        conn.set(t, h, 0.1 * (h - t))
    lam = np.array([0.3, -0.2, 0.05, 0.4])
    section2, conn2 = gauge_transform(section, conn, lam)
    for f in range(mesh.num_faces):
        before = math.fsum(conn.theta(t, h) for t, h in mesh.face_edges(f))
        after = math.fsum(conn2.theta(t, h) for t, h in mesh.face_edges(f))
        assert after == pytest.approx(before, abs=1e-12)
    assert np.allclose(section2.norms(), section.norms())


def test_discrete_potential_is_exact():
    inst = generate(GeneratorSpec(kind="disk_vortex", n=12, k=1))
    omega = np.linspace(0.5, 1.5, inst.mesh.num_faces)
    theta = discrete_potential(inst.mesh, omega)
    res = exactness_residual(inst.mesh, theta, TwoFormField(omega))
    assert np.abs(res).max() < 1e-12


def test_discrete_potential_rejects_whole_closed_mesh():
    inst = generate(GeneratorSpec(kind="monopole_sphere", n=8, k=1))
    with pytest.raises(MissingEdgeData):
        discrete_potential(inst.mesh, inst.twoform.omega)


def test_discrete_potential_on_subset_of_closed_mesh():
    inst = generate(GeneratorSpec(kind="monopole_sphere", n=8, k=1))
    faces = list(range(inst.mesh.num_faces - 4))
    theta = discrete_potential(inst.mesh, inst.twoform.omega, faces)
    for f in faces:
        circ = math.fsum(theta.theta(t, h) for t, h in inst.mesh.face_edges(f))
        assert circ == pytest.approx(inst.twoform.omega[f], abs=1e-12)


def test_twoform_reversed_and_scaled():
    tf = TwoFormField([1.0, -2.0])
    assert np.array_equal(tf.reversed().omega, [-1.0, 2.0])
    assert np.array_equal(tf.scaled(2.0).omega, [2.0, -4.0])
