import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reefdyn.errors import DomainError
from reefdyn.model import (MapConfig, ModelParams, State, continuous_rhs, rates, step,
                           step_arrays, validate)
from oracles import FLIP_SET, TWO_EQ

rate = st.floats(0.01, 2.0)
cover = st.floats(0.0, 0.95)


class TestParams:
    def test_valid_set_passes(self):
        assert validate(TWO_EQ).ok

    def test_collects_every_violation(self):
        res = validate(TWO_EQ.replace(k=0.0, r=-1.0, d=-0.1))
        assert not res
        assert len(res.violations) == 3
        assert any("k" in v for v in res.violations)

    def test_replace_keeps_others(self):
        q = TWO_EQ.replace(r=0.3)
        assert q.r == 0.3 and q.k == TWO_EQ.k

    def test_as_dict_order(self):
        assert list(TWO_EQ.as_dict()) == ["r", "k", "a", "g", "gamma", "alpha", "d"]


class TestConfigAndState:
    @pytest.mark.parametrize("delta", [0.0, -1.0, math.inf, math.nan])
    def test_bad_delta(self, delta):
        with pytest.raises(DomainError):
            MapConfig(TWO_EQ, delta)

    def test_non_finite_state(self):
        with pytest.raises(DomainError):
            State(math.nan, 0.1)

    def test_turf(self):
        assert State(0.2, 0.3).S == pytest.approx(0.5)


class TestStep:
    def test_hand_computed(self):
        p = FLIP_SET
        M, C, dl = 0.04, 0.66, 0.5
        dM = (p.r * M * (1 - M / p.k) + p.a * M * C - p.g * M / (1 - C)
              + p.gamma * M * (1 - M - C))
        dC = p.alpha * (1 - M - C) * C - p.d * C - p.a * M * C
        s = step(MapConfig(p, dl), State(M, C))
        assert s.M == pytest.approx(M + dl * dM, abs=1e-15)
        assert s.C == pytest.approx(C + dl * dC, abs=1e-15)

    def test_singular_coral_cover(self):
        with pytest.raises(DomainError):
            step(MapConfig(TWO_EQ, 0.1), State(0.0, 1.0))

    def test_array_and_scalar_agree_bitwise(self):
        cfg = MapConfig(TWO_EQ, 1.3)
        M = np.linspace(0.0, 0.5, 7)
        C = np.linspace(0.1, 0.6, 7)
        aM, aC = step_arrays(cfg, M, C)
        for i in range(7):
            s = step(cfg, State(float(M[i]), float(C[i])))
            assert (s.M, s.C) == (aM[i], aC[i])

    def test_rhs_is_rates(self):
        s = State(0.1, 0.4)
        assert continuous_rhs(TWO_EQ, s) == tuple(rates(TWO_EQ, s.M, s.C))

    @settings(max_examples=200, deadline=None)
    @given(r=rate, k=rate, a=rate, g=rate, gm=rate, al=rate, d=rate, C=cover,
           dl=st.floats(0.01, 5.0))
    def test_macroalgae_free_axis_invariant(self, r, k, a, g, gm, al, d, C, dl):
        cfg = MapConfig(ModelParams(r, k, a, g, gm, al, d), dl)
        assert step(cfg, State(0.0, C)).M == 0.0

    @settings(max_examples=200, deadline=None)
    @given(r=rate, k=rate, a=rate, g=rate, gm=rate, al=rate, d=rate, M=cover,
           dl=st.floats(0.01, 5.0))
    def test_coral_free_axis_invariant(self, r, k, a, g, gm, al, d, M, dl):
        cfg = MapConfig(ModelParams(r, k, a, g, gm, al, d), dl)
        assert step(cfg, State(M, 0.0)).C == 0.0

    @settings(max_examples=100, deadline=None)
    @given(M=cover, C=st.floats(0.0, 0.9))
    def test_small_step_tracks_flow(self, M, C):
        # one Euler step differs from the flow by O(delta^2)
        s0 = State(M, C)
        f = np.array(continuous_rhs(TWO_EQ, s0))
        for dl in (1e-3, 1e-4):
            s1 = step(MapConfig(TWO_EQ, dl), s0)
            assert np.allclose((s1.as_array() - s0.as_array()) / dl, f, atol=1e-12)
