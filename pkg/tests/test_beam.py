import math

import numpy as np
import pytest

from helicoid.beam import (
    BeamModel,
    Element,
    Section,
    assemble,
    build_guided_cantilever,
    build_helical_strut,
    build_helix_arc,
    build_segment_lattice,
    element_triad,
    model_dump,
    oracle_stiffness,
    solve_static,
)
from helicoid.errors import SolverError
from helicoid.geometry import derive_geometry
from helicoid.material import Material, shear_modulus
from helicoid.stiffness import strut_deflection

MAT = Material.from_modulus(2.0e6, nu=0.48)
STEEL = Material.from_modulus(200e9, nu=0.3)


def cantilever_model(length, section, material, n_elems, load):
    """Plain cantilever: fixed base, free tip, arbitrary tip load."""
    nodes = np.zeros((n_elems + 1, 3))
    nodes[:, 0] = np.linspace(0, length, n_elems + 1)
    elems = [
        Element(i, i + 1, element_triad(nodes[i], nodes[i + 1], np.array([0.0, 0, 1])),
                section, material)
        for i in range(n_elems)
    ]
    return BeamModel(nodes=nodes, elements=elems, fixed={0: set(range(6))},
                     loads={n_elems: np.asarray(load, float)})


class TestSection:
    def test_properties(self):
        s = Section(w=0.008, t=0.004)
        assert s.area == pytest.approx(3.2e-5)
        assert s.i_weak == pytest.approx(0.008 * 0.004**3 / 12)
        assert s.i_strong == pytest.approx(0.004 * 0.008**3 / 12)
        assert 0 < s.torsion_constant < s.i_weak + s.i_strong

    def test_square_torsion_constant(self):
        # Roark: J = 0.1406 a^4 for a square section
        s = Section(w=0.01, t=0.01)
        assert s.torsion_constant == pytest.approx(0.1406 * 0.01**4, rel=2e-3)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Section(w=0.0, t=0.01)


class TestTextbookCases:
    def test_axial_bar(self):
        sec = Section(0.01, 0.01)
        m = cantilever_model(1.7, sec, STEEL, 1, [1000.0, 0, 0, 0, 0, 0])
        res = solve_static(m)
        assert res.displacement(1)[0] == pytest.approx(
            1000.0 * 1.7 / (STEEL.E * sec.area), rel=1e-12
        )

    def test_cantilever_tip_force(self):
        sec = Section(0.01, 0.02)
        m = cantilever_model(1.3, sec, STEEL, 1, [0, 0, -5.0, 0, 0, 0])
        res = solve_static(m)
        assert res.displacement(1)[2] == pytest.approx(
            -5.0 * 1.3**3 / (3 * STEEL.E * sec.i_weak), rel=1e-12
        )

    def test_torsion_bar(self):
        sec = Section(0.01, 0.01)
        m = cantilever_model(0.9, sec, STEEL, 4, [0, 0, 0, 2.0, 0, 0])
        res = solve_static(m)
        expected = 2.0 * 0.9 / (shear_modulus(STEEL) * sec.torsion_constant)
        assert res.rotation(4)[0] == pytest.approx(expected, rel=1e-12)

    def test_fixed_guided_single_element_exact(self):
        sec = Section(0.01, 0.01)
        m = build_guided_cantilever(1.0, 0.0, sec, MAT, 1)
        k = oracle_stiffness(m, "axial")
        assert k == pytest.approx(12 * MAT.E * sec.i_weak / 1.0**3, rel=1e-9)


class TestGuidedStrut:
    def test_matches_closed_form(self, small_spec):
        geo = derive_geometry(small_spec)
        sec = Section(small_spec.w, small_spec.t)
        for n in (1, 8, 32):
            m = build_guided_cantilever(geo.L_avg, geo.alpha_avg, sec, MAT, n)
            k = oracle_stiffness(m, "axial")
            assert k * strut_deflection(1.0, small_spec, MAT.E) == pytest.approx(1.0, abs=5e-3)

    def test_zero_load_zero_displacement(self, small_spec):
        geo = derive_geometry(small_spec)
        m = build_guided_cantilever(geo.L_avg, geo.alpha_avg, Section(0.008, 0.004), MAT, 8)
        res = solve_static(m, loads={})
        assert np.abs(res.u).max() == 0.0


class TestHelicalStrut:
    def test_curved_straight_ratio_in_window(self, small_spec):
        k_curved = oracle_stiffness(build_helical_strut(small_spec, MAT, 64), "axial")
        k_straight = 1.0 / strut_deflection(1.0, small_spec, MAT.E)
        assert 0.5 < k_curved / k_straight < 2.0

    def test_self_convergence(self, small_spec):
        k64 = oracle_stiffness(build_helical_strut(small_spec, MAT, 64), "axial")
        k128 = oracle_stiffness(build_helical_strut(small_spec, MAT, 128), "axial")
        assert abs(k128 - k64) / k64 < 1e-3

    def test_straight_limit_reproduces_guided_cantilever(self, small_spec):
        geo = derive_geometry(small_spec)
        sec = Section(small_spec.w, small_spec.t)
        radius = 1e3
        arc = build_helix_arc(
            radius,
            geo.L_avg * math.cos(geo.alpha_avg) / radius,
            geo.L_avg * math.sin(geo.alpha_avg),
            sec, MAT, 64,
        )
        k_arc = oracle_stiffness(arc, "axial")
        k_guided = oracle_stiffness(
            build_guided_cantilever(geo.L_avg, geo.alpha_avg, sec, MAT, 64), "axial"
        )
        assert k_arc == pytest.approx(k_guided, rel=5e-3)


class TestLattice:
    def test_probes_and_meta(self, small_spec):
        m = build_segment_lattice(small_spec, MAT, 4)
        assert set(m.probes) == {"axial", "bending"}
        assert m.nodes[m.meta["top_master"]][2] == pytest.approx(small_spec.H)
        # struts per helix equals N_h, so nodes per helix = 4*N_h + 1
        assert m.n_nodes == small_spec.n_h * (4 * small_spec.n_h + 1) + 2

    def test_stiffness_independent_of_load_scale(self, small_spec):
        m = build_segment_lattice(small_spec, MAT, 8)
        res1 = solve_static(m, loads={m.meta["top_master"]: np.array([0, 0, 1.0, 0, 0, 0])})
        res5 = solve_static(m, loads={m.meta["top_master"]: np.array([0, 0, 5.0, 0, 0, 0])})
        u1 = res1.u[m.meta["top_master"], 2]
        u5 = res5.u[m.meta["top_master"], 2]
        assert u5 == pytest.approx(5 * u1, rel=1e-12)

    def test_fully_fixed_top_no_motion(self, small_spec):
        m = build_segment_lattice(small_spec, MAT, 8)
        m.fixed[m.meta["top_master"]] = set(range(6))
        res = solve_static(m, loads={m.meta["top_master"]: np.array([0, 0, 1.0, 0, 0, 0])})
        assert np.abs(res.u).max() == 0.0

    def test_global_matrix_symmetric(self, small_spec):
        K = assemble(build_segment_lattice(small_spec, MAT, 8))
        assert np.abs(K - K.T).max() <= 1e-12 * np.abs(K).max()

    def test_reciprocity(self, small_spec):
        m = build_segment_lattice(small_spec, MAT, 8)
        rng = np.random.default_rng(1)
        n_free = m.n_nodes - 2
        for _ in range(10):
            a, b = (int(x) for x in rng.integers(1, n_free, size=2))
            da, db = (int(x) for x in rng.integers(0, 3, size=2))
            la, lb = np.zeros(6), np.zeros(6)
            la[da] = 1.0
            lb[db] = 1.0
            res_a = solve_static(m, loads={a: la})
            res_b = solve_static(m, loads={b: lb})
            u_ab, u_ba = res_a.u[b, db], res_b.u[a, da]
            scale = max(np.abs(res_a.u).max(), np.abs(res_b.u).max())
            assert abs(u_ab - u_ba) <= 1e-9 * scale

    def test_unconstrained_model_reports_zero_modes(self, small_spec):
        m = build_segment_lattice(small_spec, MAT, 4)
        m.fixed = {}
        with pytest.raises(SolverError) as err:
            solve_static(m, loads={m.meta["top_master"]: np.array([0, 0, 1.0, 0, 0, 0])})
        assert err.value.n_zero_modes >= 6

    def test_model_dump_schema(self, small_spec):
        import json

        m = build_segment_lattice(small_spec, MAT, 2)
        dump = model_dump(m)
        json.dumps(dump)
        assert len(dump["nodes"]) == m.n_nodes
        assert len(dump["elements"]) == len(m.elements)
        assert dump["rigid_links"][0]["slaves"]


class TestRigidLinkValidation:
    def test_duplicate_slave_rejected(self, small_spec):
        m = build_segment_lattice(small_spec, MAT, 2)
        m.rigid_links.append((m.meta["base_master"], (m.rigid_links[0][1][0],)))
        with pytest.raises(ValueError, match="more than one rigid link"):
            solve_static(m)

    def test_constrained_slave_rejected(self, small_spec):
        m = build_segment_lattice(small_spec, MAT, 2)
        m.fixed[m.rigid_links[0][1][0]] = {0}
        with pytest.raises(ValueError, match="slave"):
            solve_static(m)
