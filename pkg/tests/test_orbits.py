import math

import numpy as np
import pytest

from reefdyn.equilibria import interior_equilibria
from reefdyn.errors import InsufficientSamples
from reefdyn.model import MapConfig, State
from reefdyn.orbits import (AttractorKind, SweepSpec, classify_attractor, detect_period, iterate,
                            lyapunov, orbit_summary, period_sequence, sweep)
from reefdyn.stability import jacobian, spectral_radius
from oracles import FLIP_SET, TWO_EQ, random_equilibria

IC = State(0.04, 0.66)


class TestIterate:
    def test_fixed_point_stays(self):
        E = interior_equilibria(TWO_EQ)[0]
        run = iterate(MapConfig(TWO_EQ, 0.5), E, 10, 50)
        assert np.allclose(run.samples, [E.M, E.C], atol=1e-12)

    def test_divergence_stops_early(self):
        run = iterate(MapConfig(FLIP_SET, 8.0), State(0.5, 0.2), 0, 1000)
        assert run.divergent and len(run.samples) < 1000

    def test_deterministic(self):
        cfg = MapConfig(FLIP_SET, 1.9)
        assert np.array_equal(iterate(cfg, IC).samples, iterate(cfg, IC).samples)


class TestPeriod:
    def test_minimal_period(self):
        cycle = np.array([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6], [0.7, 0.8]])
        samples = np.tile(cycle, (200, 1))
        assert detect_period(samples) == 4

    def test_none_for_noise(self, rng):
        assert detect_period(rng.uniform(size=(600, 2))) is None


class TestClassify:
    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamples):
            classify_attractor(np.zeros((10, 2)), MapConfig(TWO_EQ, 1.0))

    def test_fixed_point_lyapunov_is_log_radius(self, rng):
        for p, E in random_equilibria(rng, 20):
            cfg = MapConfig(p, 0.05)
            rho = spectral_radius(jacobian(cfg, E).as_array())
            if rho >= 0.999:
                continue
            lam = lyapunov(cfg, State(E.M + 1e-9, E.C), n=4000, transient=0)
            assert lam == pytest.approx(math.log(rho), abs=2e-3)

    def test_two_cycle(self):
        cfg = MapConfig(FLIP_SET, 1.7)
        s = orbit_summary(cfg, IC, transient=4000)
        assert s.kind is AttractorKind.PERIODIC and s.period == 2 and s.label == "Period2"
        x1, x2 = s.samples[0], s.samples[1]
        m = jacobian(cfg, State(*x2)).as_array() @ jacobian(cfg, State(*x1)).as_array()
        assert lyapunov(cfg, IC, n=4000, transient=4000) == pytest.approx(
            0.5 * math.log(spectral_radius(m)), abs=2e-3)

    def test_chaos_positive_exponent(self):
        s = orbit_summary(MapConfig(FLIP_SET, 2.0), IC, lyapunov_steps=10_000)
        assert s.kind is AttractorKind.CHAOTIC and s.lyapunov > 0.005

    def test_divergent(self):
        s = orbit_summary(MapConfig(FLIP_SET, 8.0), State(0.5, 0.2))
        assert s.kind is AttractorKind.DIVERGENT and s.label == "Divergent"


class TestSweep:
    def _spec(self, **kw):
        base = dict(cfg=MapConfig(FLIP_SET, 1.0), param="delta", lo=1.2, hi=1.975, n=24,
                    ics=(IC,), transient=1988, samples=512)
        base.update(kw)
        return SweepSpec(**base)

    def test_matches_single_runs_bitwise(self):
        spec = self._spec(n=5)
        res = sweep(spec)
        for i, dl in enumerate(res.values):
            run = iterate(MapConfig(FLIP_SET, float(dl)), IC, spec.transient, spec.samples)
            assert np.array_equal(res.summaries[i][0].samples, run.samples)

    def test_parameter_sweep_matches_single_runs(self):
        spec = self._spec(param="r", lo=0.9, hi=1.0, n=3, cfg=MapConfig(FLIP_SET, 1.5))
        res = sweep(spec)
        for i, r in enumerate(res.values):
            run = iterate(MapConfig(FLIP_SET.replace(r=float(r)), 1.5), IC, 1988, 512)
            assert np.array_equal(res.summaries[i][0].samples, run.samples)

    def test_workers_do_not_change_result(self):
        spec = self._spec(ics=(IC, State(0.035, 0.59)), n=8)
        a, b = sweep(spec, workers=1), sweep(spec, workers=2)
        assert a.periods(0) == b.periods(0) and a.periods(1) == b.periods(1)
        for ra, rb in zip(a.summaries, b.summaries):
            assert all(np.array_equal(x.samples, y.samples) for x, y in zip(ra, rb))

    def test_doubling_cascade(self):
        res = sweep(self._spec(n=60))
        seq = [k for k in period_sequence(res.periods()) if k]
        assert seq[:4] == [1, 2, 4, 8]

    @pytest.mark.parametrize("kw", [dict(lo=2.0, hi=1.0), dict(n=1), dict(param="x"),
                                    dict(ics=())])
    def test_invalid_spec(self, kw):
        with pytest.raises(ValueError):
            self._spec(**kw)

    def test_period_sequence(self):
        assert period_sequence([1, 1, 2, 2, None, 4]) == [1, 2, None, 4]
