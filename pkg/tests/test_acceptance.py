"""Acceptance suite: one test per release criterion.

Each test prints a single "ACCEPTANCE <n> <name>: pass|FAIL" line (visible
with pytest -s or in captured output on failure) and asserts the criterion
at its stated tolerance.
"""

import math

import numpy as np
import pytest

from weil_charge.bundle import (
    Obstruction,
    TransitionFunction,
    propagate_transition,
    verify_cocycle_relation,
)
from weil_charge.census import face_winding, run_census, wrap_angle
from weil_charge.cli import main as cli_main
from weil_charge.documents import read_document
from weil_charge.fields import SectionField, gauge_transform
from weil_charge.generators import GeneratorSpec, generate
from weil_charge.integrality import check_bordered, check_closed, check_corner_form
from weil_charge.mesh import build_mesh

TWO_PI = 2.0 * math.pi


def _report(num, name, ok):
    print(f"ACCEPTANCE {num} {name}: {'pass' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {num} ({name}) failed"


def test_acceptance_1_closed_surface_quantization():
    ok = True
    for k in (-2, -1, 0, 1, 2):
        inst = generate(GeneratorSpec(kind="monopole_sphere", n=24, k=k))
        rep = check_closed(inst.mesh, inst.twoform, inst.section)
        ok &= rep.census.total_charge == k
        ok &= abs(rep.total_flux - TWO_PI * k) < 1e-9
        ok &= rep.passed
    for k in (0, 1, 3):
        inst = generate(GeneratorSpec(kind="flux_torus", n=8, k=k))
        ok &= math.fsum(inst.twoform.omega) / TWO_PI == k  # bit exact
        ok &= check_closed(inst.mesh, inst.twoform, inst.section).passed
    _report(1, "closed-surface quantization", ok)


def test_acceptance_2_violation_detection():
    ok = True
    for scale in (1.1, 1.5):
        inst = generate(GeneratorSpec(kind="monopole_sphere", n=24, k=1,
                                      scale=scale))
        rep = check_closed(inst.mesh, inst.twoform, inst.section)
        ok &= not rep.passed
        ok &= abs(rep.residual - (scale - 1.0) * TWO_PI) < 1e-9
    _report(2, "violation detection", ok)


def test_acceptance_3_bordered_identity():
    ok = True
    for k in (-2, -1, 1, 2, 3):
        inst = generate(GeneratorSpec(kind="disk_vortex", n=32, k=k))
        rep = check_bordered(inst.mesh, inst.twoform, inst.section,
                             inst.connection)
        ok &= rep.census.total_charge == k
        ok &= rep.traces[0].winding == k
        ok &= rep.traces[0].holonomy == 0.0
        ok &= abs(rep.residual) < 1e-9
        ok &= rep.passed
    inst = generate(GeneratorSpec(kind="sphere_minus_cap", n=24, k=1))
    rep = check_bordered(inst.mesh, inst.twoform, inst.section, inst.connection)
    ok &= abs(rep.residual) < 1e-8 and rep.passed
    _report(3, "bordered identity", ok)


def test_acceptance_4_corner_form():
    ok = True
    for sides in (4, 6):  # square and regular hexagon
        inst = generate(GeneratorSpec(kind="polygon_tangent", n=8, k=sides))
        rep = check_corner_form(inst.mesh, inst.twoform, inst.section)
        deficit = sum(t.corner_deficit for t in rep.traces)
        ok &= abs(rep.residual) < 1e-9
        ok &= abs(deficit - TWO_PI) < 1e-9
        ok &= rep.census.total_charge == 1
        ok &= rep.passed
    residuals = []
    for n in (16, 32, 64):
        inst = generate(GeneratorSpec(kind="cap_tangent", n=n, k=1))
        rep = check_corner_form(inst.mesh, inst.twoform, inst.section)
        residuals.append(abs(rep.residual))
        ok &= rep.passed
    ok &= residuals[0] > residuals[1] > residuals[2]
    ok &= residuals[2] < 5e-2
    _report(4, "corner form", ok)


def _dense_polygon_winding(values, steps=1000):
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
    return total / TWO_PI


def test_acceptance_5_census_oracle_equivalence():
    rng = np.random.default_rng(2026)
    ok = True
    trials = 0
    while trials < 200:
        a = rng.uniform(-2, 2, (2, 2))
        if abs(np.linalg.det(a)) < 0.1:
            continue
        pts = rng.uniform(-1, 1, (3, 2))
        if pts[1][0] * pts[2][1] - pts[1][1] * pts[2][0] == 0:
            continue
        area2 = ((pts[1, 0] - pts[0, 0]) * (pts[2, 1] - pts[0, 1])
                 - (pts[1, 1] - pts[0, 1]) * (pts[2, 0] - pts[0, 0]))
        if area2 < 0:
            pts = pts[::-1]
        # reject zeros too close to an edge for the winding to be defined
        reject = False
        for i in range(3):
            p, q = pts[i], pts[(i + 1) % 3]
            d = q - p
            t = float(np.clip(-(p @ d) / (d @ d), 0.0, 1.0))
            if np.linalg.norm(p + t * d) < 0.08:
                reject = True
        if reject:
            continue
        trials += 1
        mesh = build_mesh(pts, [(0, 1, 2)])
        section = SectionField(mesh.vertices[:, :2] @ a.T)
        w = face_winding(mesh, section, 0)
        dense = _dense_polygon_winding(
            [complex(*section.psi[v]) for v in mesh.faces[0]]
        )
        ok &= w in (-1, 0, 1)
        ok &= w == round(dense) and abs(dense - round(dense)) < 1e-6
        signs = []
        for i in range(3):
            p, q = pts[i], pts[(i + 1) % 3]
            signs.append((q[0] - p[0]) * (-p[1]) - (q[1] - p[1]) * (-p[0]))
        if all(s > 0 for s in signs):  # zero enclosed (CCW triangle)
            ok &= w == (1 if np.linalg.det(a) > 0 else -1)
        else:
            ok &= w == 0
    _report(5, "census oracle equivalence", ok)


def test_acceptance_6_symmetry_suite():
    ok = True
    inst = generate(GeneratorSpec(kind="disk_vortex", n=32, k=2))

    # conjugation negates g
    g = run_census(inst.mesh, inst.section).total_charge
    ok &= run_census(inst.mesh, inst.section.conjugated()).total_charge == -g

    # orientation reversal negates flux, g, l, holonomy; verdict unchanged
    rep = check_bordered(inst.mesh, inst.twoform, inst.section, inst.connection)
    rev = check_bordered(inst.mesh.reversed(), inst.twoform.reversed(),
                         inst.section, inst.connection)
    ok &= rev.total_flux == -rep.total_flux
    ok &= rev.census.total_charge == -rep.census.total_charge
    ok &= rev.traces[0].winding == -rep.traces[0].winding
    ok &= rev.traces[0].holonomy == -rep.traces[0].holonomy
    ok &= rev.passed == rep.passed

    # gauge transforms leave every residual unchanged
    rng = np.random.default_rng(99)
    for _ in range(20):
        lam = rng.uniform(-0.3, 0.3, inst.mesh.num_vertices)
        sec2, conn2 = gauge_transform(inst.section, inst.connection, lam)
        rep2 = check_bordered(inst.mesh, inst.twoform, sec2, conn2)
        ok &= abs(rep2.residual - rep.residual) <= 1e-10

    # positive amplitude rescaling leaves the census bit-identical
    before = run_census(inst.mesh, inst.section).to_dict()
    for _ in range(5):
        factors = rng.uniform(0.1, 10.0, inst.mesh.num_vertices)
        after = run_census(inst.mesh, inst.section.rescaled(factors)).to_dict()
        ok &= after == before
    _report(6, "symmetry suite", ok)


def test_acceptance_7_sufficiency_construction():
    ok = True
    for k in (1, 2):
        inst = generate(GeneratorSpec(kind="monopole_sphere", n=24, k=k))
        tf = propagate_transition(inst.atlas)
        ok &= isinstance(tf, TransitionFunction)
        ok &= tf.winding == k
        ok &= verify_cocycle_relation(tf, inst.atlas) < 1e-10
        ok &= max(abs(abs(c) - 1.0) for c in tf.values().values()) < 1e-12
    inst = generate(GeneratorSpec(kind="monopole_sphere", n=24, k=1, scale=1.5))
    obs = propagate_transition(inst.atlas)
    ok &= isinstance(obs, Obstruction)
    ok &= abs(obs.fractional_part - 0.5) < 1e-8
    _report(7, "sufficiency construction", ok)


def test_acceptance_8_cross_module_consistency():
    ok = True
    for k in (-2, -1, 0, 1, 2):
        inst = generate(GeneratorSpec(kind="monopole_sphere", n=24, k=k))
        g = run_census(inst.mesh, inst.section).total_charge
        flux_int = round(math.fsum(inst.twoform.omega) / TWO_PI)
        tf = propagate_transition(inst.atlas)
        ok &= g == flux_int == tf.winding == k
    _report(8, "cross-module consistency", ok)


def test_acceptance_9_cli_contract(tmp_path):
    ok = True
    inst = tmp_path / "disk.json"
    census = tmp_path / "census.json"
    check = tmp_path / "check.json"
    svg = tmp_path / "disk.svg"
    codes = [
        cli_main(["generate", "disk-vortex", "--n", "32", "--k", "2",
                  "-o", str(inst)]),
        cli_main(["census", str(inst), "-o", str(census)]),
        cli_main(["check", str(inst), "--identity", "bordered",
                  "-o", str(check)]),
        cli_main(["plot", str(inst), "--report", str(census), "-o", str(svg)]),
    ]
    ok &= codes == [0, 0, 0, 0]
    cdoc = read_document(census)
    ok &= cdoc["total_charge"] == 2
    ok &= all({"face", "position", "winding", "hopf_index", "brouwer_degree"}
              <= set(v) for v in cdoc["vortices"])
    rdoc = read_document(check)
    ok &= {"identity", "total_flux", "flux_over_h", "census", "boundary",
           "terms", "residual", "tolerance", "passed"} <= set(rdoc)
    ok &= rdoc["passed"] is True
    ok &= svg.read_text().startswith("<svg")

    bad = tmp_path / "bad.json"
    codes = [
        cli_main(["generate", "monopole-sphere", "--n", "24", "--k", "1",
                  "--scale", "1.5", "-o", str(bad)]),
        cli_main(["census", str(bad)]),
        cli_main(["check", str(bad)]),
    ]
    ok &= codes == [0, 0, 1]
    _report(9, "CLI contract", ok)
