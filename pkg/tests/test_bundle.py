import cmath
import math

import numpy as np
import pytest

from weil_charge.bundle import (
    ChartAtlas,
    Obstruction,
    TransitionFunction,
    propagate_transition,
    seam_defect,
    section_in_chart,
    verify_cocycle_relation,
)
from weil_charge.errors import InconsistentAtlas
from weil_charge.fields import ConnectionField
from weil_charge.generators import GeneratorSpec, generate

TWO_PI = 2.0 * math.pi


def monopole(k, n=16, scale=1.0):
    return generate(GeneratorSpec(kind="monopole_sphere", n=n, k=k, scale=scale))


def test_atlas_validates():
    inst = monopole(1)
    inst.atlas.validate(inst.twoform)
    assert not inst.atlas.overlap_simply_connected()
    assert inst.atlas.overlap_faces


def test_atlas_rejects_non_covering():
    inst = monopole(1)
    atlas = inst.atlas
    broken = ChartAtlas(
        mesh=atlas.mesh,
        chart1_faces=atlas.chart1_faces - {0},
        chart2_faces=atlas.chart2_faces - {0},
        connection1=atlas.connection1,
        connection2=atlas.connection2,
    )
    with pytest.raises(InconsistentAtlas):
        broken.validate()


def test_transition_function_winding_equals_charge():
    for k in (-2, -1, 0, 1, 2):
        inst = monopole(k)
        result = propagate_transition(inst.atlas)
        assert isinstance(result, TransitionFunction)
        assert result.winding == k
        assert verify_cocycle_relation(result, inst.atlas) < 1e-10
        moduli = [abs(c) for c in result.values().values()]
        assert max(abs(m - 1.0) for m in moduli) < 1e-12


def test_fractional_flux_obstruction():
    inst = monopole(1, scale=1.5)
    result = propagate_transition(inst.atlas)
    assert isinstance(result, Obstruction)
    assert result.fractional_part == pytest.approx(0.5, abs=1e-8)
    assert result.defect == pytest.approx(1.5 * TWO_PI, abs=1e-8)


def test_seam_defect_matches_flux():
    inst = monopole(2)
    defect = seam_defect(inst.atlas)
    assert defect == pytest.approx(sum(inst.twoform.omega), abs=1e-9)


def test_transition_base_point_independence():
    inst = monopole(1)
    atlas = inst.atlas
    tf = propagate_transition(atlas)
    # rebasing multiplies every sample by one global phase: the winding and
    # the cocycle residual are unchanged
    rebased = TransitionFunction(
        phases={v: p + 0.7 for v, p in tf.phases.items()},
        reference_vertex=tf.reference_vertex,
        loop_defect=tf.loop_defect,
    )
    assert rebased.winding == tf.winding
    assert verify_cocycle_relation(rebased, atlas) < 1e-10
    for v in tf.phases:
        assert abs(rebased.value(v) / tf.value(v) - cmath.exp(0.7j)) < 1e-12


def test_inconsistent_potentials_detected():
    inst = generate(GeneratorSpec(kind="disk_vortex", n=8, k=1))
    mesh = inst.mesh
    faces = set(range(mesh.num_faces))
    rng = np.random.default_rng(11)
    conn1 = ConnectionField()
    conn2 = ConnectionField()
    for t, h in mesh.undirected_edges():
        conn1.set(t, h, 0.0)
        conn2.set(t, h, rng.uniform(-0.5, 0.5))  # not closed: path dependent
    atlas = ChartAtlas(
        mesh=mesh,
        chart1_faces=frozenset(faces),
        chart2_faces=frozenset(faces),
        connection1=conn1,
        connection2=conn2,
    )
    with pytest.raises(InconsistentAtlas):
        propagate_transition(atlas)


def test_section_in_chart_flat_case():
    # zero curvature: transport is path independent, both chart sections
    # coincide with the fiber data and the transition function is 1
    inst = monopole(0)
    atlas = inst.atlas
    tf = propagate_transition(atlas)
    assert all(abs(c - 1.0) < 1e-10 for c in tf.values().values())
    ones = {v: 1.0 for v in atlas.chart_vertices(1) | atlas.chart_vertices(2)}
    s1 = section_in_chart(atlas, 1, ones)
    s2 = section_in_chart(atlas, 2, ones)
    for v in sorted(atlas.overlap_vertices()):
        assert abs(s1[v] - 1.0) < 1e-10
        assert abs(s2[v] - 1.0) < 1e-10


def test_section_in_chart_anchor_value():
    inst = monopole(1)
    atlas = inst.atlas
    fiber = {v: 1.0 + 0.5j for v in atlas.chart_vertices(1)}
    s = section_in_chart(atlas, 1, fiber)
    assert abs(s[atlas.anchor1] - (1.0 + 0.5j)) < 1e-14


def test_hermitian_compatibility_of_transport():
    # parallel transport is by unit phases, so the fiber metric is preserved
    inst = monopole(2)
    atlas = inst.atlas
    fiber = {v: 2.5 for v in atlas.chart_vertices(1)}
    s = section_in_chart(atlas, 1, fiber)
    assert all(abs(abs(val) - 2.5) < 1e-12 for val in s.values())
