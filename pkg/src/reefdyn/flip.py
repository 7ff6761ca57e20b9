"""Period-doubling analysis of an interior fixed point.

At a critical step size one eigenvalue of the Jacobian equals -1. The map is
moved to the eigenbasis of the Jacobian, reduced to its one-dimensional centre
manifold ``v = a1 u^2 + a2 u e + a3 e^2``, and the restricted map

    u' = -u + b1 u^2 + b2 u e + b3 u^2 e + b4 u e^2 + b5 u^3

decides the bifurcation through ``omega1 = 2 b2`` (transversality) and
``omega2 = 2 b1^2 + 2 b5`` (positive: the period-2 orbit is attracting along
the centre manifold).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateTransform, NotInFlipRegion
from .model import MapConfig, State
from .stability import char_data, jacobian
from .taylor import TaylorCoeffs, taylor_coeffs, transform_map

DEGENERATE_TOL = 1e-10
#: Relative gap between the formula and direct second eigenvalue that is flagged.
LAMBDA_AGREE_TOL = 1e-8


class FlipVerdict(str, Enum):
    STABLE_P2 = "StableP2"
    UNSTABLE_P2 = "UnstableP2"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class FlipNormalForm:
    lambda2: float
    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    omega1: float
    omega2: float
    verdict: FlipVerdict


@dataclass(frozen=True)
class FlipReport:
    delta1: float
    branch: str
    #: second eigenvalue from 3 + U delta1
    lambda2: float
    #: second eigenvalue computed from the Jacobian at delta1
    lambda2_direct: float
    lambda2_agree: bool
    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    omega1: float
    omega2: float
    verdict: FlipVerdict
    #: verdict is StableP2 and the transverse eigenvalue lies inside the unit circle
    cycle_stable: bool
    #: False when V <= 0 (only the lower branch exists there)
    within_hypotheses: bool
    coeffs: TaylorCoeffs


def flip_point(cfg: MapConfig, E: State, branch: str = "F1") -> float:
    """Critical step size where an eigenvalue of the Jacobian at ``E`` is -1.

    ``F1`` is the lower root of ``4 + 2 delta U + delta^2 V = 0`` and ``F2``
    the upper one. With ``V < 0`` the quadratic has a single positive root,
    returned for ``F1``.
    """
    if branch not in ("F1", "F2"):
        raise ValueError(f"branch must be 'F1' or 'F2', got {branch!r}")
    cd = char_data(jacobian(cfg, E), cfg)
    U, V = cd.U, cd.V
    if V > 0 and U < -2 * math.sqrt(V):
        sq = math.sqrt(U * U - 4 * V)
        return (-U - sq) / V if branch == "F1" else (-U + sq) / V
    if V < 0 and branch == "F1":
        return (-U - math.sqrt(U * U - 4 * V)) / V
    raise NotInFlipRegion(f"no {branch} flip step size: U={U:.6g}, V={V:.6g}")


def flip_normal_form(tc: TaylorCoeffs, lambda2: float, tol: float = DEGENERATE_TOL) -> FlipNormalForm:
    """Centre-manifold and restricted-map coefficients from Taylor data.

    ``lambda2`` is the non-critical eigenvalue. The eigenbasis is
    ``(i010, -1 - i100)`` for -1 and ``(i010, lambda2 - i100)`` for ``lambda2``.
    """
    if abs(tc.i010) < tol:
        raise DegenerateTransform(f"i010 = {tc.i010:.3e} makes the eigenbasis singular")
    if abs(1 + lambda2) < tol:
        raise DegenerateTransform("double eigenvalue -1 makes the eigenbasis singular")
    P = np.array([[tc.i010, tc.i010], [-1 - tc.i100, lambda2 - tc.i100]])
    d, c = transform_map(tc.polys(), P)
    cf = lambda poly, p, q, s: float(poly.get((p, q, s), 0.0))

    a1 = cf(c, 2, 0, 0) / (1 - lambda2)
    a2 = -cf(c, 1, 0, 1) / (1 + lambda2)
    a3 = cf(c, 0, 0, 2) / (1 - lambda2) + 0.0  # no e^2 terms: exactly zero

    d_uv, d_ve = cf(d, 1, 1, 0), cf(d, 0, 1, 1)
    b1 = cf(d, 2, 0, 0)
    b2 = cf(d, 1, 0, 1)
    b3 = cf(d, 2, 0, 1) + d_uv * a2 + d_ve * a1
    b4 = d_ve * a2
    b5 = cf(d, 3, 0, 0) + d_uv * a1
    omega1 = 2 * b2
    omega2 = 2 * b1**2 + 2 * b5
    if abs(omega1) < tol or abs(omega2) < tol:
        verdict = FlipVerdict.DEGENERATE
    else:
        verdict = FlipVerdict.STABLE_P2 if omega2 > 0 else FlipVerdict.UNSTABLE_P2
    return FlipNormalForm(lambda2, a1, a2, a3, b1, b2, b3, b4, b5, omega1, omega2, verdict)


def flip_discriminants(cfg: MapConfig, E: State, branch: str = "F1", mode: str = "coupled",
                       check_fixed: bool = True, lambda2: float | None = None,
                       expand_delta: float | None = None) -> FlipReport:
    """Run the full reduction at the flip step size of ``E``.

    ``lambda2`` overrides the second eigenvalue; by default ``3 + U delta1``
    is used. ``expand_delta`` takes the Taylor expansion at that step size
    instead of at ``delta1``, for reproducing values quoted at a nominal step.
    """
    delta1 = flip_point(cfg, E, branch)
    cfg1 = cfg.with_delta(delta1)
    cd = char_data(jacobian(cfg1, E), cfg1)
    lam_formula = 3 + cd.U * delta1
    # the eigenvalue farther from -1 is the non-critical one
    lam_direct = max((z.real for z in cd.eigs), key=lambda x: abs(x + 1))
    agree = abs(lam_formula - lam_direct) <= LAMBDA_AGREE_TOL * max(1.0, abs(lam_direct))
    cfg_t = cfg1 if expand_delta is None else cfg.with_delta(expand_delta)
    tc = taylor_coeffs(cfg_t, E, mode=mode, check_fixed=check_fixed)
    lam = lam_formula if lambda2 is None else lambda2
    nf = flip_normal_form(tc, lam)
    return FlipReport(
        delta1=delta1, branch=branch, lambda2=lam_formula, lambda2_direct=lam_direct,
        lambda2_agree=agree, a1=nf.a1, a2=nf.a2, a3=nf.a3, b1=nf.b1, b2=nf.b2, b3=nf.b3,
        b4=nf.b4, b5=nf.b5, omega1=nf.omega1, omega2=nf.omega2, verdict=nf.verdict,
        cycle_stable=nf.verdict is FlipVerdict.STABLE_P2 and abs(lam_direct) < 1,
        within_hypotheses=cd.V > 0, coeffs=tc,
    )
