import csv
import io
import math

import numpy as np
import pytest

from helicoid.errors import InvalidSpecError
from helicoid.geometry import HelicoidSpec, derive_geometry
from helicoid.material import Material
from helicoid.stiffness import (
    STRAIN_FORMULA_NOTE,
    axial_stiffness,
    bending_stiffness,
    section_second_moment,
    series_stiffness,
    stiffness_report,
    strut_deflection,
    strut_reactions,
    sweep,
    sweep_csv,
)

from conftest import random_valid_specs


class TestReactions:
    def test_zero_load(self, small_spec):
        r = strut_reactions(0.0, small_spec)
        assert r.r1 == 0 and r.m == 0

    def test_unit_load_small_module(self, small_spec):
        # direct evaluation: M = L/2 * cos(alpha) = 0.0115016 N*m
        r = strut_reactions(1.0, small_spec)
        assert r.r1 == 0.5
        assert r.m == pytest.approx(0.0115016, abs=1e-6)

    def test_steep_helix_moment_vanishes(self):
        # alpha -> pi/2 kills the cos factor
        spec = HelicoidSpec(H=1.0, D=0.004, w=0.0015, t=0.001, n_h=3)
        geo = derive_geometry(spec)
        r = strut_reactions(1.0, spec)
        assert r.m < 1e-2 * (geo.L / 2)


class TestDeflection:
    def test_zero_force(self, small_spec):
        assert strut_deflection(0.0, small_spec, 2.0e6) == 0

    def test_small_module(self, small_spec):
        # reciprocal of the axial stiffness
        y = strut_deflection(1.0, small_spec, 2.0e6)
        assert y == pytest.approx(1.0101e-2, rel=1e-3)

    def test_linear_in_force(self, small_spec):
        y1 = strut_deflection(1.0, small_spec, 2.0e6)
        assert strut_deflection(2.0, small_spec, 2.0e6) == pytest.approx(2 * y1, rel=1e-15)

    def test_nominal_variant_smaller_load_line(self, small_spec):
        # nominal (outer-edge) quantities give a different, larger deflection
        y_avg = strut_deflection(1.0, small_spec, 2.0e6, averaged=True)
        y_nom = strut_deflection(1.0, small_spec, 2.0e6, averaged=False)
        assert y_nom != pytest.approx(y_avg, rel=1e-3)

    def test_reciprocity_with_stiffness(self):
        rng = np.random.default_rng(3)
        for spec in random_valid_specs(rng, 30):
            product = axial_stiffness(spec, 2.0e6) * strut_deflection(1.0, spec, 2.0e6)
            assert product == pytest.approx(1.0, rel=1e-12)


class TestAxialStiffness:
    def test_small_module(self, small_spec):
        assert axial_stiffness(small_spec, 2.0e6) == pytest.approx(99.0, rel=2e-3)

    def test_large_module(self, large_spec):
        assert axial_stiffness(large_spec, 2.28e6) == pytest.approx(354.6, rel=5e-3)

    def test_linear_in_modulus(self, small_spec):
        k1 = axial_stiffness(small_spec, 2.0e6)
        assert axial_stiffness(small_spec, 7.0e6) == pytest.approx(3.5 * k1, rel=1e-15)

    def test_monotone_in_width_and_thickness(self):
        rng = np.random.default_rng(5)
        for spec in random_valid_specs(rng, 40):
            k0 = axial_stiffness(spec, 2.0e6)
            wider = HelicoidSpec(spec.H, spec.D, spec.w * 1.05, spec.t, spec.n_h)
            thicker = HelicoidSpec(spec.H, spec.D, spec.w, spec.t * 1.02, spec.n_h)
            if np.pi * (wider.D - wider.w) - 2 * wider.t > 0 and wider.w < wider.D / 2:
                assert axial_stiffness(wider, 2.0e6) > k0
            if thicker.t * thicker.n_h < thicker.H:
                assert axial_stiffness(thicker, 2.0e6) > k0

    def test_decreasing_in_height_past_turnover(self):
        # the closed form turns over at 4H^2 = 5*run^2; past that, taller
        # segments are softer (short squat segments stiffen with H instead)
        rng = np.random.default_rng(6)
        count = 0
        for spec in random_valid_specs(rng, 200):
            run = math.pi * (spec.D - spec.w) - 2 * spec.t
            if spec.H**2 <= 1.26 * run**2:
                continue
            taller = HelicoidSpec(spec.H * 1.05, spec.D, spec.w, spec.t, spec.n_h)
            assert axial_stiffness(taller, 2.0e6) < axial_stiffness(spec, 2.0e6)
            count += 1
        assert count > 20


class TestBendingStiffness:
    def test_small_module(self, small_spec):
        assert bending_stiffness(small_spec, 2.0e6) == pytest.approx(0.0326, rel=2e-3)

    def test_large_module(self, large_spec):
        assert bending_stiffness(large_spec, 2.28e6) == pytest.approx(0.185, rel=5e-3)

    def test_ratio_identity(self):
        rng = np.random.default_rng(9)
        for spec in random_valid_specs(rng, 100):
            geo = derive_geometry(spec)
            ratio = bending_stiffness(spec, 2.0e6) / axial_stiffness(spec, 2.0e6)
            assert ratio == pytest.approx(2.25 * geo.R_m**3 / spec.H, rel=1e-12)


class TestReport:
    def test_small_module_shore45(self, small_spec):
        rep = stiffness_report(small_spec, Material.from_shore_a(45))
        assert rep.k_ax == pytest.approx(100.88, rel=1e-3)
        assert rep.k_bend == pytest.approx(0.03325, rel=1e-3)
        assert rep.feasible
        assert rep.i_section == section_second_moment(small_spec)
        assert "4.58" in rep.strain_note and "6.88" in rep.strain_note

    def test_invalid_spec_no_partial_report(self):
        with pytest.raises(InvalidSpecError):
            stiffness_report(
                HelicoidSpec(H=0.12, D=0.06, w=0.04, t=0.004, n_h=3),
                Material.from_shore_a(45),
            )

    def test_series_helper(self):
        assert series_stiffness(99.0, 3) == pytest.approx(33.0)
        with pytest.raises(ValueError):
            series_stiffness(99.0, 0)

    def test_strain_note_constant_carried(self, small_spec):
        rep = stiffness_report(small_spec, Material.from_shore_a(45))
        assert rep.strain_note == STRAIN_FORMULA_NOTE


class TestSweep:
    def test_helix_count_monotone(self, small_spec, mat_2mpa):
        rows = sweep(small_spec, "N_h", [3, 4, 5, 6], mat_2mpa)
        k = [r.k_ax for r in rows]
        assert all(b > a for a, b in zip(k, k[1:]))

    def test_thickness_cubic_after_freezing_averaged_run(self, small_spec, mat_2mpa):
        # with the 2t term removed from the averaged run, k_ax is an
        # exact cubic in t
        geo_run = math.pi * (small_spec.D - small_spec.w)
        length = math.sqrt(small_spec.H**2 + geo_run**2) / (2 * small_spec.n_h)
        angle = math.atan2(2 * small_spec.H, geo_run)

        def frozen_k(t):
            inertia = small_spec.w * t**3 / 12
            return 12 * mat_2mpa.E * inertia / (length**3 * math.cos(angle) ** 2)

        assert frozen_k(0.008) / frozen_k(0.004) == pytest.approx(8.0, rel=1e-12)
        # while the real sweep deviates from a pure cubic because of the
        # t inside the averaged quantities
        rows = sweep(small_spec, "t", [0.004, 0.008], mat_2mpa)
        assert rows[1].k_ax / rows[0].k_ax != pytest.approx(8.0, rel=1e-3)

    def test_empty_values(self, small_spec, mat_2mpa):
        assert sweep(small_spec, "t", [], mat_2mpa) == []

    def test_invalid_rows_collected(self, small_spec, mat_2mpa):
        rows = sweep(small_spec, "w", [0.008, 0.03, 0.01], mat_2mpa)
        assert rows[0].error is None and rows[2].error is None
        assert rows[1].error is not None and "w < D/2" in rows[1].error

    def test_csv_round_trips_floats(self, small_spec, mat_2mpa):
        rows = sweep(small_spec, "t", [0.004, 0.005], mat_2mpa)
        text = sweep_csv(rows)
        parsed = list(csv.DictReader(io.StringIO(text)))
        assert float(parsed[0]["k_ax_N_per_m"]) == rows[0].k_ax
        assert float(parsed[1]["eps_max"]) == rows[1].eps_max

    def test_unknown_parameter(self, small_spec, mat_2mpa):
        with pytest.raises(ValueError, match="unknown sweep parameter"):
            sweep(small_spec, "Q", [1.0], mat_2mpa)
