import numpy as np
import pytest

from reefdyn.control import (AffineForm, closed_loop, controllability, hybrid_design,
                             hybrid_simulate, ogy_design, ogy_lines_from, ogy_simulate)
from reefdyn.equilibria import equilibria, interior_equilibria
from reefdyn.model import MapConfig, State
from reefdyn.stability import Jacobian2, spectral_radius
from oracles import CORAL_B, TWO_EQ, random_equilibria, settle

PRINTED_J = Jacobian2(1.505, 0.036, -0.126, 1.248)
PRINTED_B = np.array([0.041, 0.0694])


def _jury_stable(m) -> bool:
    tr, det = np.trace(m), np.linalg.det(m)
    return abs(tr) - 1 < det < 1


class TestOgyLines:
    def test_printed_example(self):
        lines = ogy_lines_from(PRINTED_J, PRINTED_B)
        want = {"L1": (-0.04862, -0.109665, 0.88273),
                "L2": (0.00765, 0.040226, -0.129767),
                "L3": (-0.089578, -0.179106, 5.635693)}
        for name, coeffs in want.items():
            f = getattr(lines, name)
            assert (f.c1, f.c2, f.c0) == pytest.approx(coeffs, abs=1e-3)
        _, detC = controllability(PRINTED_J, PRINTED_B)
        assert detC == pytest.approx(-0.0011, abs=2e-4)
        assert lines.region.nonempty and lines.region.bounded

    def test_lines_are_char_poly_values(self, rng):
        for _ in range(200):
            J = Jacobian2(*rng.uniform(-2, 2, 4))
            B = rng.uniform(-1, 1, 2)
            H = rng.uniform(-5, 5, 2)
            lines = ogy_lines_from(J, B)
            m = closed_loop(J, B, H)
            tr, det = np.trace(m), np.linalg.det(m)
            assert lines.L1(*H) == pytest.approx(det - 1, abs=1e-12)
            assert lines.L2(*H) == pytest.approx(-(1 - tr + det), abs=1e-12)
            assert lines.L3(*H) == pytest.approx(1 + tr + det, abs=1e-12)

    def test_membership_predicts_spectral_radius(self, rng):
        lines = ogy_lines_from(PRINTED_J, PRINTED_B)
        xs = [v[0] for v in lines.region.vertices]
        ys = [v[1] for v in lines.region.vertices]
        for _ in range(1000):
            H = (rng.uniform(min(xs) - 50, max(xs) + 50), rng.uniform(min(ys) - 50, max(ys) + 50))
            assert bool(lines.stable(*H)) == (spectral_radius(closed_loop(PRINTED_J, PRINTED_B, H)) < 1)

    def test_vertices_lie_on_two_lines(self):
        lines = ogy_lines_from(PRINTED_J, PRINTED_B)
        for v in lines.region.vertices:
            vals = sorted(abs(f(*v)) for f in (lines.L1, lines.L2, lines.L3))
            assert vals[0] < 1e-9 and vals[1] < 1e-9

    def test_affine_format(self):
        assert AffineForm(1.0, -2.5, 0.25).format(2) == "+1.00*rho1 -2.50*rho2 +0.25"


class TestOgyDesign:
    def test_rates_vanish_at_fixed_point(self):
        E = interior_equilibria(TWO_EQ)[0]
        design = ogy_design(MapConfig(TWO_EQ, 2.0), E)
        assert np.max(np.abs(design.B)) < 1e-10
        assert not design.controllable

    def test_zero_gains_reproduce_map(self):
        cfg = MapConfig(TWO_EQ, 2.0)
        E = interior_equilibria(TWO_EQ)[0]
        run = ogy_simulate(cfg, E, (0.0, 0.0), 0.5, State(0.2, 0.4), 200)
        assert np.array_equal(run.orbit, settle(TWO_EQ, 2.0, State(0.2, 0.4), 200))

    def test_linear_loop_contracts_inside_region(self):
        lines = ogy_lines_from(PRINTED_J, PRINTED_B)
        H = np.mean(lines.region.vertices, axis=0)
        E = State(0.08, 0.28)
        run = ogy_simulate(MapConfig(CORAL_B, 1.0), E, H, 1e9, State(0.081, 0.281), 5000,
                           mode="linear", J=PRINTED_J, B=PRINTED_B)
        assert run.captured

    def test_window_switches_control_off(self):
        E = State(0.08, 0.28)
        run = ogy_simulate(MapConfig(CORAL_B, 1.0), E, (100.0, 0.0), 0.01, State(0.2, 0.28), 1,
                           mode="linear", J=PRINTED_J, B=PRINTED_B)
        assert run.deltas[0] == 1.0

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            ogy_simulate(MapConfig(TWO_EQ, 1.0), State(0.1, 0.1), (0, 0), 0.0, State(0.1, 0.1), 5)


class TestHybrid:
    def test_endpoints_on_unit_circle(self, rng):
        seen = 0
        for p, E in random_equilibria(rng, 300):
            design = hybrid_design(MapConfig(p, float(rng.uniform(0.5, 5))), E)
            if design.zeta_interval is None:
                continue
            for z in design.zeta_interval:
                if 0 < z < 1:
                    mods = np.abs(np.linalg.eigvals(design.J_star_at(z)))
                    assert np.min(np.abs(mods - 1)) < 1e-8
                    seen += 1
        assert seen > 20

    def test_interval_matches_brute_force(self, rng):
        for p, E in random_equilibria(rng, 50):
            design = hybrid_design(MapConfig(p, float(rng.uniform(0.5, 5))), E)
            for z in np.linspace(0.01, 0.99, 50):
                stable = spectral_radius(design.J_star_at(z)) < 1
                iv = design.zeta_interval
                inside = iv is not None and iv[0] < z < iv[1]
                if inside:
                    assert stable
                if stable:
                    assert _jury_stable(design.J_star_at(z))

    def test_unit_weight_is_plain_map(self):
        cfg = MapConfig(TWO_EQ, 2.0)
        run = hybrid_simulate(cfg, 1.0, State(0.2, 0.4), 300)
        assert np.array_equal(run.orbit, settle(TWO_EQ, 2.0, State(0.2, 0.4), 300))

    def test_fixed_points_preserved(self):
        cfg = MapConfig(CORAL_B, 3.1)
        for _, E in equilibria(CORAL_B).labelled():
            run = hybrid_simulate(cfg, 0.37, E, 5)
            assert np.allclose(run.orbit, [E.M, E.C], atol=1e-12)

    def test_stabilises_coral_axis(self):
        cfg = MapConfig(CORAL_B, 3.1)
        E = equilibria(CORAL_B).axial_C
        design = hybrid_design(cfg, E)
        lo, hi = design.zeta_interval
        run = hybrid_simulate(cfg, 0.5 * (lo + hi), State(E.M + 1e-3, E.C - 1e-3), 100_000, E=E)
        assert run.captured

    def test_expanding_real_eigenvalue_cannot_be_stabilised(self):
        # the coral-dominated interior point has a real eigenvalue above 1
        cfg = MapConfig(CORAL_B, 3.1)
        E = interior_equilibria(CORAL_B)[0]
        design = hybrid_design(cfg, E)
        assert max(np.linalg.eigvals(design.J.as_array()).real) > 1
        assert design.zeta_interval is None

    def test_bad_zeta(self):
        with pytest.raises(ValueError):
            hybrid_simulate(MapConfig(TWO_EQ, 1.0), 0.0, State(0.1, 0.1), 5)
