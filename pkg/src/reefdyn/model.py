"""Macroalgae-coral cover model and its forward-Euler map.

Covers are fractions of the seabed: macroalgae ``M``, coral ``C`` and algal
turf ``S = 1 - M - C``. Turf is eliminated, leaving the planar system

    dM/dt = r M (1 - M/k) + a M C - g M / (1 - C) + gamma M (1 - M - C)
    dC/dt = alpha (1 - M - C) C - d C - a M C

whose Euler discretisation with step ``delta`` is the map analysed by the
rest of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import DomainError

#: Absolute tolerance on |1 - C| below which the grazing term is singular.
SINGULARITY_TOL = 1e-12

PARAM_NAMES = ("r", "k", "a", "g", "gamma", "alpha", "d")


@dataclass(frozen=True)
class ModelParams:
    """The seven ecological rates of one reef model instance."""

    r: float
    k: float
    a: float
    g: float
    gamma: float
    alpha: float
    d: float

    def replace(self, **changes: float) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class MapConfig:
    params: ModelParams
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise DomainError(f"delta must be finite and > 0, got {self.delta!r}")

    def with_delta(self, delta: float) -> "MapConfig":
        return MapConfig(self.params, delta)


@dataclass(frozen=True)
class State:
    """A point of the (M, C) phase plane.

    Iterates are not confined to the unit square; only non-finite values are
    rejected.
    """

    M: float
    C: float

    def __post_init__(self):
        if not (math.isfinite(self.M) and math.isfinite(self.C)):
            raise DomainError(f"state must be finite, got ({self.M!r}, {self.C!r})")

    @property
    def S(self) -> float:
        return 1.0 - self.M - self.C

    def as_array(self) -> np.ndarray:
        return np.array([self.M, self.C])

    def __iter__(self):
        yield self.M
        yield self.C


@dataclass
class ValidationResult:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(p: ModelParams) -> ValidationResult:
    """Collect every violated parameter constraint (empty means valid)."""
    out = ValidationResult()
    for name in PARAM_NAMES:
        v = getattr(p, name)
        if not math.isfinite(v):
            out.violations.append(f"{name} must be finite")
        elif v < 0:
            out.violations.append(f"{name} must be ≥ 0")
    if math.isfinite(p.k) and p.k == 0:
        out.violations.append("k must be > 0")
    if math.isfinite(p.alpha) and p.alpha == 0:
        out.violations.append("alpha must be > 0")
    return out


def _check_singular(C) -> None:
    if np.any(np.abs(1.0 - np.asarray(C)) < SINGULARITY_TOL):
        raise DomainError("grazing term singular at C = 1")


def rates(p: ModelParams, M, C):
    """Right-hand side of the planar ODE; accepts scalars or numpy arrays."""
    _check_singular(C)
    dM = p.r * M * (1 - M / p.k) + p.a * M * C - p.g * M / (1 - C) + p.gamma * M * (1 - M - C)
    dC = p.alpha * (1 - M - C) * C - p.d * C - p.a * M * C
    return dM, dC


def continuous_rhs(p: ModelParams, s: State) -> tuple[float, float]:
    return rates(p, s.M, s.C)


def step_raw(p: ModelParams, delta, M, C):
    """One Euler step on raw coordinates (scalars or broadcastable arrays).

    Uses exactly the arithmetic of :func:`rates`, so the result is bit-identical
    to ``M + delta * rates(...)`` whatever the container type.
    """
    dM, dC = rates(p, M, C)
    return M + delta * dM, C + delta * dC


def step_arrays(cfg: MapConfig, M, C):
    return step_raw(cfg.params, cfg.delta, M, C)


def step(cfg: MapConfig, s: State) -> State:
    M, C = step_arrays(cfg, s.M, s.C)
    return State(float(M), float(C))


def jacobian_entries(p: ModelParams, delta: float, M: float, C: float):
    """Closed-form Jacobian entries (a11, a12, a21, a22) of the map."""
    _check_singular(C)
    r, k, a, g, gm, al, d = p.r, p.k, p.a, p.g, p.gamma, p.alpha, p.d
    a11 = 1 + delta * (r - 2 * r * M / k + a * C - g / (1 - C) + gm - 2 * gm * M - gm * C)
    a12 = delta * (a * M - g * M / (1 - C) ** 2 - gm * M)
    a21 = -delta * (al + a) * C
    a22 = 1 + delta * (al - al * M - 2 * al * C - d - a * M)
    return a11, a12, a21, a22
