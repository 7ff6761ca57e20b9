"""Orbit iteration, attractor classification, Lyapunov exponents and sweeps.

Sweeps advance every grid point of one initial condition as a single numpy
array, so one pass of the loop moves the whole bifurcation diagram forward by
one step. Elementwise float arithmetic is identical for scalars and arrays,
so a sweep reproduces :func:`iterate` bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, InsufficientSamples
from .model import SINGULARITY_TOL, MapConfig, State, jacobian_entries, step_raw

DIVERGENCE = 1e6
MAX_PERIOD = 64
RECURRENCE_TOL = 1e-6
LYAP_TOL = 0.005
MIN_SAMPLES = 512
TRANSIENT = 2000
SAMPLES = 512
#: inner radius / outer radius above which samples count as an annulus
ANNULUS_RATIO = 0.05


class AttractorKind(str, Enum):
    FIXED_POINT = "FixedPoint"
    PERIODIC = "PeriodK"
    QUASI_PERIODIC = "QuasiPeriodic"
    CHAOTIC = "Chaotic"
    DIVERGENT = "Divergent"
    #: not periodic up to MAX_PERIOD yet not clearly chaotic or quasi-periodic
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class OrbitSamples:
    samples: np.ndarray  # shape (k, 2); fewer rows than requested if divergent
    divergent: bool = False
    cause: str | None = None


@dataclass(frozen=True)
class AttractorSummary:
    kind: AttractorKind
    samples: np.ndarray
    lyapunov: float | None = None
    period: int | None = None

    @property
    def label(self) -> str:
        if self.kind is AttractorKind.PERIODIC:
            return f"Period{self.period}"
        return self.kind.value


def _bad(M, C):
    with np.errstate(invalid="ignore"):
        return ~(np.isfinite(M) & np.isfinite(C)) | (np.abs(M) > DIVERGENCE) | \
            (np.abs(C) > DIVERGENCE) | (np.abs(1.0 - C) < SINGULARITY_TOL)


def iterate(cfg: MapConfig, ic: State, transient: int = TRANSIENT,
            samples: int = SAMPLES) -> OrbitSamples:
    """Discard ``transient`` steps and keep the next ``samples`` states.

    Iteration stops early once a coordinate exceeds the divergence cutoff or
    the orbit hits the grazing singularity.
    """
    p, dl = cfg.params, cfg.delta
    M, C = ic.M, ic.C
    out = np.empty((samples, 2))
    for n in range(transient + samples):
        try:
            M, C = step_raw(p, dl, M, C)
        except DomainError as exc:
            return OrbitSamples(out[:max(0, n - transient)], True, str(exc))
        if _bad(M, C):
            return OrbitSamples(out[:max(0, n - transient)], True, f"|state| > {DIVERGENCE:g}")
        if n >= transient:
            out[n - transient] = M, C
    return OrbitSamples(out)


def detect_period(samples: np.ndarray, max_period: int = MAX_PERIOD,
                  tol: float = RECURRENCE_TOL) -> int | None:
    """Smallest ``k`` with ``max |x[n+k] - x[n]| < tol`` over the samples."""
    return int(detect_periods(samples[None], max_period, tol)[0]) or None


def detect_periods(samples: np.ndarray, max_period: int = MAX_PERIOD,
                   tol: float = RECURRENCE_TOL) -> np.ndarray:
    """Vectorised :func:`detect_period` over a leading batch axis; 0 = none."""
    G = samples.shape[0]
    out = np.zeros(G, dtype=int)
    todo = np.ones(G, dtype=bool)
    for k in range(1, min(max_period, samples.shape[1] - 1) + 1):
        with np.errstate(invalid="ignore"):
            err = np.max(np.abs(samples[:, k:] - samples[:, :-k]), axis=(1, 2))
        hit = todo & (err < tol)
        out[hit] = k
        todo &= ~hit
        if not todo.any():
            break
    return out


def _tangent_growth(p, delta, M, C, steps: int, out_state: bool = False):
    """Average log stretch of a tangent vector carried along the orbit.

    Works on scalars or arrays of starting points; the tangent vector is
    renormalised every step. Returns NaN where the orbit diverges.
    """
    M = np.array(M, dtype=float)
    C = np.array(C, dtype=float)
    vx = np.full(M.shape, math.sqrt(0.5))
    vy = np.full(M.shape, math.sqrt(0.5))
    total = np.zeros(M.shape)
    dead = np.zeros(M.shape, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(steps):
            safe_C = np.where(dead, 0.0, C)
            a11, a12, a21, a22 = jacobian_entries(p, delta, np.where(dead, 0.0, M), safe_C)
            vx, vy = a11 * vx + a12 * vy, a21 * vx + a22 * vy
            norm = np.hypot(vx, vy)
            total += np.log(norm)
            vx, vy = vx / norm, vy / norm
            M, C = step_raw(p, delta, np.where(dead, 0.0, M), safe_C)
            dead |= _bad(M, C) | ~np.isfinite(total)
    lam = np.where(dead, np.nan, total / steps)
    return (lam, M, C) if out_state else lam


def lyapunov(cfg: MapConfig, ic: State, n: int = 10_000, transient: int = 1000) -> float:
    """Largest Lyapunov exponent after ``transient`` steps; NaN if divergent."""
    run = iterate(cfg, ic, transient, 1)
    if run.divergent:
        return math.nan
    M, C = run.samples[0]
    return float(_tangent_growth(cfg.params, cfg.delta, M, C, n))


def _annular(samples: np.ndarray) -> bool:
    centre = samples.mean(axis=0)
    rad = np.hypot(*(samples - centre).T)
    return rad.max() > 0 and rad.min() > ANNULUS_RATIO * rad.max()


def _summarise(samples, divergent, period, lam) -> AttractorSummary:
    if divergent:
        return AttractorSummary(AttractorKind.DIVERGENT, samples, None, None)
    lam = None if lam is None or not math.isfinite(lam) else float(lam)
    if period:
        kind = AttractorKind.FIXED_POINT if period == 1 else AttractorKind.PERIODIC
        return AttractorSummary(kind, samples, lam, period)
    if lam is None:
        return AttractorSummary(AttractorKind.UNRESOLVED, samples, None, None)
    if lam > LYAP_TOL:
        kind = AttractorKind.CHAOTIC
    elif lam >= -LYAP_TOL and _annular(samples):
        kind = AttractorKind.QUASI_PERIODIC
    else:
        kind = AttractorKind.UNRESOLVED
    return AttractorSummary(kind, samples, lam, None)


def classify_attractor(samples: np.ndarray, cfg: MapConfig,
                       lyapunov_steps: int | None = None) -> AttractorSummary:
    """Label post-transient samples.

    The Lyapunov exponent is measured along the samples themselves unless
    ``lyapunov_steps`` asks for a longer run continued from the last sample.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < MIN_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    if _bad(samples[:, 0], samples[:, 1]).any():
        return _summarise(samples, True, None, None)
    period = detect_period(samples)
    if lyapunov_steps:
        lam = _tangent_growth(cfg.params, cfg.delta, *samples[-1], lyapunov_steps)
    else:
        lam = _tangent_growth(cfg.params, cfg.delta, *samples[0], len(samples))
    return _summarise(samples, False, period, float(lam))


def orbit_summary(cfg: MapConfig, ic: State, transient: int = TRANSIENT,
                  samples: int = SAMPLES, lyapunov_steps: int | None = None) -> AttractorSummary:
    run = iterate(cfg, ic, transient, samples)
    if run.divergent:
        return _summarise(run.samples, True, None, None)
    return classify_attractor(run.samples, cfg, lyapunov_steps)


SWEEPABLE = ("delta", "r", "k", "a", "g", "gamma", "alpha", "d")


@dataclass(frozen=True)
class SweepSpec:
    cfg: MapConfig
    param: str
    lo: float
    hi: float
    n: int
    ics: tuple[State, ...]
    transient: int = TRANSIENT
    samples: int = SAMPLES

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.param!r}; choose from {SWEEPABLE}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"sweep range must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.n < 2:
            raise ValueError("sweep grid needs at least 2 points")
        if self.transient < 0 or self.samples <= 0 or not self.ics:
            raise ValueError("sweep needs transient >= 0, samples > 0 and at least one IC")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass
class SweepResult:
    spec: SweepSpec
    values: np.ndarray
    #: summaries[i][j] for grid index i and initial condition j
    summaries: list[list[AttractorSummary]] = field(default_factory=list)

    def periods(self, ic_index: int = 0) -> list[int | None]:
        return [row[ic_index].period for row in self.summaries]

    def kinds(self, ic_index: int = 0) -> list[AttractorKind]:
        return [row[ic_index].kind for row in self.summaries]


def _sweep_one_ic(spec: SweepSpec, values: np.ndarray, ic: State) -> list[AttractorSummary]:
    G = values.size
    if spec.param == "delta":
        p, delta = spec.cfg.params, values
    else:
        p, delta = spec.cfg.params.replace(**{spec.param: values}), spec.cfg.delta
    M = np.full(G, ic.M)
    C = np.full(G, ic.C)
    dead = np.zeros(G, dtype=bool)
    store = np.empty((G, spec.samples, 2))
    with np.errstate(all="ignore"):
        for n in range(spec.transient + spec.samples):
            M, C = step_raw(p, delta, np.where(dead, 0.0, M), np.where(dead, 0.0, C))
            dead |= _bad(M, C)
            if n >= spec.transient:
                store[:, n - spec.transient, 0] = M
                store[:, n - spec.transient, 1] = C
    periods = detect_periods(np.where(dead[:, None, None], np.nan, store))
    lam = _tangent_growth(p, delta, np.where(dead, 0.0, store[:, 0, 0]),
                          np.where(dead, 0.0, store[:, 0, 1]), spec.samples)
    return [_summarise(store[i], bool(dead[i]), int(periods[i]), float(lam[i]))
            for i in range(G)]


def sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Iterate and classify every (grid value, initial condition) pair.

    Initial conditions are independent and may run on ``workers`` threads;
    results are assembled by index, so the output does not depend on it.
    """
    values = spec.grid()
    if workers > 1 and len(spec.ics) > 1:
        with ThreadPoolExecutor(workers) as pool:
            per_ic = list(pool.map(lambda ic: _sweep_one_ic(spec, values, ic), spec.ics))
    else:
        per_ic = [_sweep_one_ic(spec, values, ic) for ic in spec.ics]
    rows = [[per_ic[j][i] for j in range(len(spec.ics))] for i in range(values.size)]
    return SweepResult(spec, values, rows)


def period_sequence(periods: list[int | None]) -> list[int | None]:
    """Collapse consecutive repeats: ``[1, 1, 2, 2, None, 4] -> [1, 2, None, 4]``."""
    out: list[int | None] = []
    for k in periods:
        if not out or out[-1] != k:
            out.append(k)
    return out


__all__ = [
    "AttractorKind", "AttractorSummary", "OrbitSamples", "SweepSpec", "SweepResult",
    "iterate", "detect_period", "detect_periods", "classify_attractor", "orbit_summary",
    "lyapunov", "sweep", "period_sequence",
]
