import numpy as np
import pytest

from reefdyn.equilibria import interior_equilibria
from reefdyn.errors import NotAFixedPoint
from reefdyn.model import MapConfig, State
from reefdyn.stability import jacobian
from reefdyn.taylor import partial, substitute_linear, taylor_coeffs, transform_map
from oracles import FLIP_SET, TWO_EQ, close, fd_taylor, random_equilibria, shifted_map

KEYS = [(p, q, s) for p in range(4) for q in range(4) for s in range(2) if 1 <= p + q <= 3]


def _check_all(tc, f, E):
    polys = tc.polys()
    bad = []
    scale = min(1.0, (1 - E.C) / 0.3)
    for key in KEYS:
        fd = fd_taylor(f, *key, scale=scale)
        for comp in range(2):
            got = polys[comp].get(key, 0.0)
            if not close(got, fd[comp]):
                bad.append((comp, key, got, float(fd[comp])))
    return bad


class TestCoupled:
    @pytest.mark.parametrize("p", [TWO_EQ, FLIP_SET], ids=["two_eq", "flip"])
    def test_paper_sets(self, p):
        for E in interior_equilibria(p):
            for dl in (0.7, 2.9):
                tc = taylor_coeffs(MapConfig(p, dl), E)
                assert _check_all(tc, shifted_map(p, dl, E), E) == []

    def test_random_draws(self, rng):
        for p, E in random_equilibria(rng, 10):
            dl = float(rng.uniform(0.2, 4))
            tc = taylor_coeffs(MapConfig(p, dl), E)
            assert _check_all(tc, shifted_map(p, dl, E), E) == []

    def test_linear_part_is_jacobian(self):
        E = interior_equilibria(TWO_EQ)[1]
        cfg = MapConfig(TWO_EQ, 1.3)
        assert np.array_equal(taylor_coeffs(cfg, E).linear(), jacobian(cfg, E).as_array())

    def test_requires_fixed_point(self):
        with pytest.raises(NotAFixedPoint):
            taylor_coeffs(MapConfig(FLIP_SET, 1.0), State(0.04, 0.66))

    def test_verbatim_point_allowed(self):
        s = State(0.04, 0.66)
        tc = taylor_coeffs(MapConfig(FLIP_SET, 1.0), s, check_fixed=False)
        # first-order and mixed terms still follow the map at a non-fixed point
        assert _check_all(tc, shifted_map(FLIP_SET, 1.0, s), s) == []


class TestFrozen:
    def test_matches_frozen_map(self):
        s = State(0.04, 0.66)
        tc = taylor_coeffs(MapConfig(FLIP_SET, 0.5), s, mode="frozen", check_fixed=False)
        assert _check_all(tc, shifted_map(FLIP_SET, 0.5, s, frozen=True), s) == []

    def test_bad_mode(self):
        E = interior_equilibria(TWO_EQ)[0]
        with pytest.raises(ValueError):
            taylor_coeffs(MapConfig(TWO_EQ, 1.0), E, mode="other")


class TestPolynomialTools:
    def test_identity_transform(self):
        poly = {(2, 0, 0): 1.5, (1, 1, 1): -2.0, (0, 3, 0): 0.25}
        out = transform_map((poly, {}), np.eye(2))
        assert {k: v for k, v in out[0].items() if v} == pytest.approx(poly)

    def test_substitution_matches_evaluation(self, rng):
        poly = {(p, q, s): float(rng.normal()) for p in range(4) for q in range(4)
                for s in range(2) if p + q <= 3}
        P = rng.normal(size=(2, 2))
        sub = substitute_linear(poly, P)
        u, v, e = 0.3, -0.2, 0.7
        x, y = P @ [u, v]
        ev = lambda d, a, b: sum(c * a**p * b**q * e**s for (p, q, s), c in d.items())
        assert ev(sub, u, v) == pytest.approx(ev(poly, x, y), rel=1e-12)

    def test_partial_factorials(self):
        assert partial({(2, 1, 0): 1.0}, 2, 1) == 2.0
        assert partial({(3, 0, 1): 0.5}, 3, 0, 1) == 3.0
