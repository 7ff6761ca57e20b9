"""Linearisation of the map at a fixed point and its stability type.

With ``u1 = (a11 - 1)/delta`` and ``u2 = (a22 - 1)/delta`` the Jacobian has

    tr J  = 2 + delta U,          U = u1 + u2
    det J = 1 + delta U + delta^2 V,   V = u1 u2 - a12 a21 / delta^2

and ``U``, ``V`` do not depend on ``delta``. The stability type as a function
of ``delta`` therefore follows from the signs of ``U``, ``V`` and two
thresholds, which :func:`classify` cross-checks against eigenvalue moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InternalInconsistency, NotAFixedPoint
from .equilibria import residual
from .model import MapConfig, State, jacobian_entries

#: ||lambda| - 1| below which an eigenvalue is treated as on the unit circle.
UNIT_TOL = 1e-9
#: Relative distance to a threshold inside which the two routes may disagree.
BOUNDARY_BAND = 1e-7
FIXED_POINT_TOL = 1e-8


@dataclass(frozen=True)
class Jacobian2:
    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def from_array(cls, m) -> "Jacobian2":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21


def jacobian(cfg: MapConfig, s: State) -> Jacobian2:
    return Jacobian2(*jacobian_entries(cfg.params, cfg.delta, s.M, s.C))


def quadratic_roots(A: float, B: float, disc: float | None = None) -> tuple[complex, complex]:
    """Roots of ``lam^2 + A lam + B`` avoiding cancellation.

    ``disc`` may be passed when a more accurate ``A^2 - 4B`` is available.
    """
    if disc is None:
        disc = A * A - 4 * B
    if disc >= 0:
        sq = math.sqrt(disc)
        q = -0.5 * (A + math.copysign(sq, A))
        if q == 0.0:
            return complex(0.0), complex(0.0)
        return complex(q), complex(B / q)
    im = 0.5 * math.sqrt(-disc)
    return complex(-0.5 * A, im), complex(-0.5 * A, -im)


@dataclass(frozen=True)
class CharData:
    """Characteristic data of ``lam^2 + A lam + B`` with ``F(lam)`` its value."""

    A: float
    B: float
    U: float
    V: float
    u1: float
    u2: float
    F1: float
    Fm1: float
    eigs: tuple[complex, complex]
    delta: float

    @property
    def disc(self) -> float:
        return self.A * self.A - 4 * self.B


def char_data(J: Jacobian2, cfg: MapConfig | float) -> CharData:
    delta = cfg.delta if isinstance(cfg, MapConfig) else float(cfg)
    u1 = (J.a11 - 1) / delta
    u2 = (J.a22 - 1) / delta
    U = u1 + u2
    V = u1 * u2 - J.a12 * J.a21 / delta**2
    A = -J.trace
    B = J.det
    # (a11 - a22)^2 + 4 a12 a21 equals A^2 - 4B without the cancellation
    disc = (J.a11 - J.a22) ** 2 + 4 * J.a12 * J.a21
    eigs = quadratic_roots(A, B, disc)
    return CharData(A=A, B=B, U=U, V=V, u1=u1, u2=u2,
                    F1=delta**2 * V, Fm1=4 + 2 * delta * U + delta**2 * V,
                    eigs=eigs, delta=delta)


class RootLocation(str, Enum):
    BOTH_INSIDE = "BothInside"
    SPLIT = "Split"
    BOTH_OUTSIDE = "BothOutside"
    FLIP_BOUNDARY = "FlipBoundary"
    UNIT_COMPLEX_PAIR = "UnitComplexPair"
    HYPOTHESIS_VIOLATED = "HypothesisViolated"


def lemma1_case(cd: CharData, tol: float = UNIT_TOL) -> RootLocation:
    """Locate both roots relative to the unit circle from the signs of
    ``F(1)``, ``F(-1)`` and ``B`` (valid only when ``F(1) > 0``)."""
    F1 = 1 + cd.A + cd.B
    Fm1 = 1 - cd.A + cd.B
    if F1 <= 0:
        return RootLocation.HYPOTHESIS_VIOLATED
    if cd.disc < 0 and abs(cd.B - 1) <= tol:
        return RootLocation.UNIT_COMPLEX_PAIR
    if abs(Fm1) <= tol and abs(cd.A) > tol and abs(cd.A - 2) > tol:
        return RootLocation.FLIP_BOUNDARY
    if Fm1 < 0:
        return RootLocation.SPLIT
    if cd.B < 1:
        return RootLocation.BOTH_INSIDE
    return RootLocation.BOTH_OUTSIDE


class StabilityClass(str, Enum):
    SINK = "Sink"
    SOURCE = "Source"
    SADDLE = "Saddle"
    NON_HYPERBOLIC = "NonHyperbolic"


@dataclass(frozen=True)
class Thresholds:
    delta_flip_minus: float | None = None
    delta_flip_plus: float | None = None
    delta_ns: float | None = None


@dataclass(frozen=True)
class StabilityReport:
    cls: StabilityClass
    jacobian: Jacobian2
    char: CharData
    thresholds: Thresholds
    #: "F1", "F2" or "N" when delta sits on the matching critical value
    region: str | None
    #: False when V <= 0, where only the eigenvalue route is authoritative
    within_hypotheses: bool
    #: True when delta lies within the boundary band of a threshold
    near_boundary: bool

    @property
    def eigs(self) -> tuple[complex, complex]:
        return self.char.eigs


def eigen_class(eigs, tol: float = UNIT_TOL) -> StabilityClass:
    mods = [abs(z) for z in eigs]
    if any(abs(m - 1) < tol for m in mods):
        return StabilityClass.NON_HYPERBOLIC
    inside = sum(m < 1 for m in mods)
    return {2: StabilityClass.SINK, 0: StabilityClass.SOURCE}.get(inside, StabilityClass.SADDLE)


def thresholds(U: float, V: float) -> Thresholds:
    """Critical step sizes implied by ``U`` and ``V``.

    For ``V < 0`` only the positive root of ``F(-1) = 0`` exists; it is
    returned as ``delta_flip_minus``.
    """
    if V > 0:
        if U < -2 * math.sqrt(V):
            sq = math.sqrt(U * U - 4 * V)
            return Thresholds(delta_flip_minus=(-U - sq) / V, delta_flip_plus=(-U + sq) / V)
        if U < 0:
            return Thresholds(delta_ns=-U / V)
        return Thresholds()
    if V < 0:
        return Thresholds(delta_flip_minus=(-U - math.sqrt(U * U - 4 * V)) / V)
    return Thresholds()


def interval_class(U: float, V: float, delta: float, band: float = 0.0) -> StabilityClass:
    """Stability type from the position of ``delta`` relative to the thresholds.

    ``band`` is a relative tolerance for landing on a threshold.
    """
    th = thresholds(U, V)
    on = lambda x: x is not None and abs(delta - x) <= band * x
    if V > 0:
        if U >= 0:
            return StabilityClass.SOURCE
        if th.delta_ns is not None or U == -2 * math.sqrt(V):
            crit = th.delta_ns if th.delta_ns is not None else -U / V
            if on(crit) or delta == crit:
                return StabilityClass.NON_HYPERBOLIC
            return StabilityClass.SINK if delta < crit else StabilityClass.SOURCE
        lo, hi = th.delta_flip_minus, th.delta_flip_plus
        if on(lo) or on(hi) or delta in (lo, hi):
            return StabilityClass.NON_HYPERBOLIC
        if delta < lo:
            return StabilityClass.SINK
        return StabilityClass.SADDLE if delta < hi else StabilityClass.SOURCE
    if V < 0:
        crit = th.delta_flip_minus
        if on(crit) or delta == crit:
            return StabilityClass.NON_HYPERBOLIC
        return StabilityClass.SADDLE if delta < crit else StabilityClass.SOURCE
    return StabilityClass.NON_HYPERBOLIC  # eigenvalue 1 whenever V = 0


def _region(th: Thresholds, V: float, delta: float) -> str | None:
    if V <= 0:
        return None
    for name, x in (("F1", th.delta_flip_minus), ("F2", th.delta_flip_plus), ("N", th.delta_ns)):
        if x is not None and abs(delta - x) <= BOUNDARY_BAND * x:
            return name
    return None


def classify(cfg: MapConfig, E: State, check_fixed: bool = True) -> StabilityReport:
    """Classify a fixed point by both the threshold route and eigenvalue moduli.

    Disagreement away from a threshold raises :class:`InternalInconsistency`;
    inside the boundary band the eigenvalue route wins.
    """
    if check_fixed:
        res = residual(cfg.params, E)
        if res * cfg.delta > FIXED_POINT_TOL:
            raise NotAFixedPoint(f"step residual {res * cfg.delta:.3e} at {E}")
    J = jacobian(cfg, E)
    cd = char_data(J, cfg)
    by_eigs = eigen_class(cd.eigs)
    th = thresholds(cd.U, cd.V)
    within = cd.V > 0
    by_interval = interval_class(cd.U, cd.V, cfg.delta)
    near = any(
        x is not None and abs(cfg.delta - x) <= BOUNDARY_BAND * abs(x)
        for x in (th.delta_flip_minus, th.delta_flip_plus, th.delta_ns)
    )
    if by_interval != by_eigs and not near and cd.V != 0:
        raise InternalInconsistency(
            f"threshold route says {by_interval.value}, eigenvalues say {by_eigs.value} "
            f"(U={cd.U!r}, V={cd.V!r}, delta={cfg.delta!r}, |eigs|={[abs(z) for z in cd.eigs]})"
        )
    return StabilityReport(cls=by_eigs, jacobian=J, char=cd, thresholds=th,
                           region=_region(th, cd.V, cfg.delta),
                           within_hypotheses=within, near_boundary=near)


def spectral_radius(m) -> float:
    return float(max(abs(z) for z in np.linalg.eigvals(np.asarray(m, dtype=float))))


def unit_circle_distance(eigs) -> float:
    return min(abs(abs(z) - 1) for z in eigs)


__all__ = [
    "Jacobian2", "CharData", "RootLocation", "StabilityClass", "Thresholds",
    "StabilityReport", "jacobian", "char_data", "lemma1_case", "classify",
    "eigen_class", "interval_class", "thresholds", "quadratic_roots",
    "spectral_radius", "unit_circle_distance",
]
