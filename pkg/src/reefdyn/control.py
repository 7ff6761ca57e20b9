"""Stabilising an unstable fixed point: OGY step-size feedback and hybrid control.

OGY perturbs the step size by ``-H (x - E)`` with gain row ``H = (rho1, rho2)``.
The linearised closed loop ``J - B H`` is stable exactly when

    L1 = det - 1 < 0,   L2 = -(1 - tr + det) < 0,   L3 = 1 + tr + det > 0,

each an affine function of the gains. ``B`` is the derivative of the map with
respect to the step size, which is the vector of rates and therefore vanishes
at a true fixed point; a ``(J, B)`` pair can also be supplied directly.

Hybrid control replaces the map by ``zeta f + (1 - zeta) id``, whose
Jacobian ``J* = zeta J + (1 - zeta) I`` has eigenvalues ``1 + zeta (lam - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAFixedPoint
from .equilibria import residual
from .model import MapConfig, State, rates, step_raw
from .stability import Jacobian2, jacobian

FIXED_POINT_TOL = 1e-8
UNCONTROLLABLE_TOL = 1e-12
CAPTURE_TOL = 1e-6
CAPTURE_HOLD = 100


@dataclass(frozen=True)
class AffineForm:
    """``c1 rho1 + c2 rho2 + c0``."""

    c1: float
    c2: float
    c0: float

    def __call__(self, rho1, rho2):
        return self.c1 * rho1 + self.c2 * rho2 + self.c0

    def format(self, precision: int = 6) -> str:
        f = f"{{:+.{precision}f}}"
        return f"{f.format(self.c1)}*rho1 {f.format(self.c2)}*rho2 {f.format(self.c0)}"


@dataclass(frozen=True)
class GainRegion:
    """Intersection of ``L1 < 0``, ``L2 < 0`` and ``L3 > 0`` in the gain plane."""

    vertices: tuple[tuple[float, float], ...]
    bounded: bool

    @property
    def nonempty(self) -> bool:
        return len(self.vertices) == 3 and _area(self.vertices) > 0


@dataclass(frozen=True)
class OgyLines:
    L1: AffineForm
    L2: AffineForm
    L3: AffineForm
    region: GainRegion
    controllable: bool

    def stable(self, rho1, rho2):
        """Whether the gains lie strictly inside the stability region."""
        return (self.L1(rho1, rho2) < 0) & (self.L2(rho1, rho2) < 0) & (self.L3(rho1, rho2) > 0)


@dataclass(frozen=True)
class OgyDesign:
    J: Jacobian2
    B: np.ndarray
    Cmat: np.ndarray
    detC: float
    controllable: bool
    lines: OgyLines
    delta0: float
    E: State

    @property
    def region(self) -> GainRegion:
        return self.lines.region


def closed_loop(J: Jacobian2, B, gains) -> np.ndarray:
    return J.as_array() - np.outer(np.asarray(B, dtype=float), np.asarray(gains, dtype=float))


def controllability(J: Jacobian2, B) -> tuple[np.ndarray, float]:
    B = np.asarray(B, dtype=float)
    Cm = np.column_stack([B, J.as_array() @ B])
    return Cm, float(Cm[0, 0] * Cm[1, 1] - Cm[0, 1] * Cm[1, 0])


def ogy_lines_from(J: Jacobian2, B) -> OgyLines:
    B1, B2 = (float(b) for b in B)
    tr, det = J.trace, J.det
    # det(J - B H) = det J - H adj(J) B, tr(J - B H) = tr J - H B
    k1 = J.a22 * B1 - J.a12 * B2
    k2 = J.a11 * B2 - J.a21 * B1
    L1 = AffineForm(-k1, -k2, det - 1)
    L2 = AffineForm(-(B1 - k1), -(B2 - k2), -(1 - tr + det))
    L3 = AffineForm(-(B1 + k1), -(B2 + k2), 1 + tr + det)
    _, detC = controllability(J, B)
    return OgyLines(L1, L2, L3, _region(L1, L2, L3), abs(detC) >= UNCONTROLLABLE_TOL)


def _area(v) -> float:
    (x1, y1), (x2, y2), (x3, y3) = v
    return 0.5 * abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))


def _region(L1: AffineForm, L2: AffineForm, L3: AffineForm) -> GainRegion:
    # write every constraint as n . rho + c < 0
    cons = [(L1.c1, L1.c2, L1.c0), (L2.c1, L2.c2, L2.c0), (-L3.c1, -L3.c2, -L3.c0)]
    verts = []
    for i in range(3):
        for j in range(i + 1, 3):
            A = np.array([cons[i][:2], cons[j][:2]])
            if abs(np.linalg.det(A)) < 1e-15:
                continue
            pt = np.linalg.solve(A, -np.array([cons[i][2], cons[j][2]]))
            k = 3 - i - j
            val = cons[k][0] * pt[0] + cons[k][1] * pt[1] + cons[k][2]
            scale = max(1.0, abs(cons[k][2]), float(np.abs(pt).max()))
            if val <= 1e-12 * scale:
                verts.append((float(pt[0]), float(pt[1])))
    n = [np.array(c[:2]) for c in cons]
    cross = lambda u, v: u[0] * v[1] - u[1] * v[0]
    mu = [cross(n[1], n[2]), cross(n[2], n[0]), cross(n[0], n[1])]
    bounded = all(m > 0 for m in mu) or all(m < 0 for m in mu)
    return GainRegion(tuple(verts), bounded and len(verts) == 3)


def ogy_design(cfg: MapConfig, E: State, check_fixed: bool = True) -> OgyDesign:
    if check_fixed:
        res = residual(cfg.params, E)
        if res * cfg.delta > FIXED_POINT_TOL:
            raise NotAFixedPoint(f"step residual {res * cfg.delta:.3e} at {E}")
    J = jacobian(cfg, E)
    B = np.array(rates(cfg.params, E.M, E.C), dtype=float)
    Cm, detC = controllability(J, B)
    lines = ogy_lines_from(J, B)
    return OgyDesign(J, B, Cm, detC, lines.controllable, lines, cfg.delta, E)


@dataclass(frozen=True)
class ControlledRun:
    orbit: np.ndarray  # shape (n + 1, 2)
    #: step size applied at each iteration (OGY) or None (hybrid)
    deltas: np.ndarray | None
    #: first index from which the orbit stays within CAPTURE_TOL for CAPTURE_HOLD steps
    capture_step: int | None

    @property
    def captured(self) -> bool:
        return self.capture_step is not None


def capture_step(orbit: np.ndarray, E: State, tol: float = CAPTURE_TOL,
                 hold: int = CAPTURE_HOLD) -> int | None:
    close = np.max(np.abs(orbit - np.array([E.M, E.C])), axis=1) < tol
    run = 0
    for i, c in enumerate(close):
        run = run + 1 if c else 0
        if run >= hold:
            return i - hold + 1
    return None


def ogy_simulate(cfg: MapConfig, E: State, gains, eps: float, ic: State, n: int,
                 mode: str = "nonlinear", J: Jacobian2 | None = None, B=None) -> ControlledRun:
    """Iterate with the step size ``delta0 - rho1 (M - M*) - rho2 (C - C*)``.

    When that value leaves ``(delta0 - eps, delta0 + eps)`` the control is
    switched off for the step. ``mode="linear"`` iterates the deviation under
    ``J x + B (delta - delta0)`` instead, with ``J`` and ``B`` defaulting to
    the linearisation at ``E``.
    """
    if not eps > 0:
        raise ValueError("eps must be > 0")
    rho1, rho2 = (float(g) for g in gains)
    d0 = cfg.delta
    p = cfg.params
    orbit = np.empty((n + 1, 2))
    deltas = np.empty(n)
    M, C = ic.M, ic.C
    orbit[0] = M, C
    if mode == "linear":
        Jm = (J if J is not None else jacobian(cfg, E)).as_array()
        Bv = np.asarray(B if B is not None else rates(p, E.M, E.C), dtype=float)
    elif mode != "nonlinear":
        raise ValueError(f"unknown mode {mode!r}")
    for i in range(n):
        dl = d0 - rho1 * (M - E.M) - rho2 * (C - E.C)
        if not abs(dl - d0) < eps:
            dl = d0
        deltas[i] = dl
        if mode == "nonlinear":
            M, C = step_raw(p, dl, M, C)
        else:
            x = Jm @ np.array([M - E.M, C - E.C]) + Bv * (dl - d0)
            M, C = E.M + x[0], E.C + x[1]
        orbit[i + 1] = M, C
        if not (np.isfinite(M) and np.isfinite(C)):
            orbit[i + 2:] = np.nan
            break
    return ControlledRun(orbit, deltas, capture_step(orbit, E))


@dataclass(frozen=True)
class HybridDesign:
    J: Jacobian2
    #: maximal open sub-interval of (0, 1) with a stable J*, or None
    zeta_interval: tuple[float, float] | None
    #: roots of the boundary quadratics inside (0, 1)
    boundary_roots: tuple[float, ...]

    def J_star_at(self, zeta: float) -> np.ndarray:
        return zeta * self.J.as_array() + (1 - zeta) * np.eye(2)


def _jury_margins(tr: float, det: float, zeta: float) -> tuple[float, float, float]:
    ts = zeta * tr + 2 * (1 - zeta)
    ds = zeta**2 * det + zeta * (1 - zeta) * tr + (1 - zeta) ** 2
    return 1 - ds, 1 - ts + ds, 1 + ts + ds


def _roots_in_unit(coeffs) -> list[float]:
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if c.size < 2:
        return []
    return [float(z.real) for z in np.roots(c) if abs(z.imag) < 1e-12 and 0 < z.real < 1]


def hybrid_design(cfg: MapConfig, E: State, check_fixed: bool = True) -> HybridDesign:
    """Find the range of ``zeta`` for which ``J*`` is stable.

    With ``F1 = 1 - tr + det`` the Jury margins of ``J*`` are

        1 - det*       = -zeta (tr - 2) - zeta^2 F1
        1 - tr* + det* = zeta^2 F1
        1 + tr* + det* = 4 + 2 zeta (tr - 2) + zeta^2 F1
    """
    if check_fixed:
        res = residual(cfg.params, E)
        if res * cfg.delta > FIXED_POINT_TOL:
            raise NotAFixedPoint(f"step residual {res * cfg.delta:.3e} at {E}")
    J = jacobian(cfg, E)
    tr, det = J.trace, J.det
    F1 = 1 - tr + det
    roots = sorted(set(_roots_in_unit([-F1, -(tr - 2), 0.0])
                       + _roots_in_unit([F1, 2 * (tr - 2), 4.0])))
    cuts = [0.0, *roots, 1.0]
    best = None
    run_lo = None
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        ok = all(m > 0 for m in _jury_margins(tr, det, mid))
        if ok and run_lo is None:
            run_lo = lo
        if (not ok or hi == 1.0) and run_lo is not None:
            end = hi if ok else lo
            if best is None or end - run_lo > best[1] - best[0]:
                best = (run_lo, end)
            run_lo = None
    return HybridDesign(J, best, tuple(roots))


def hybrid_step(cfg: MapConfig, zeta: float, M, C):
    fM, fC = step_raw(cfg.params, cfg.delta, M, C)
    return zeta * fM + (1 - zeta) * M, zeta * fC + (1 - zeta) * C


def hybrid_simulate(cfg: MapConfig, zeta: float, ic: State, n: int,
                    E: State | None = None) -> ControlledRun:
    """Iterate the convex combination of the map and the identity.

    ``zeta = 1`` reproduces the uncontrolled map bit for bit.
    """
    if not 0 < zeta <= 1:
        raise ValueError(f"zeta must lie in (0, 1], got {zeta!r}")
    orbit = np.empty((n + 1, 2))
    M, C = ic.M, ic.C
    orbit[0] = M, C
    for i in range(n):
        M, C = hybrid_step(cfg, zeta, M, C)
        orbit[i + 1] = M, C
        if not (np.isfinite(M) and np.isfinite(C)):
            orbit[i + 2:] = np.nan
            break
    cap = capture_step(orbit, E) if E is not None else None
    return ControlledRun(orbit, None, cap)
