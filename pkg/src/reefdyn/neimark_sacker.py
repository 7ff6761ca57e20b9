"""Neimark-Sacker analysis of an interior fixed point.

When ``-2 sqrt(V) < U < 0`` and ``V > 0`` the Jacobian has a complex pair
that crosses the unit circle at ``delta2 = -U/V``. In the frame

    (x, y) = P2 (M~, C~),   P2 = [[i010, 0], [sigma1 - i100, -sigma2]]

the linear part is a rotation and the sign of the first Lyapunov-type
coefficient ``psi`` decides whether the closed invariant curve born at
``delta2`` attracts (``psi < 0``) or repels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateTransform, NotInNsRegion
from .model import MapConfig, State
from .stability import char_data, jacobian
from .taylor import TaylorCoeffs, partial, taylor_coeffs, transform_map

DEGENERATE_TOL = 1e-10
PSI_TOL = 1e-9
RESONANCE_TOL = 1e-9


class NsVerdict(str, Enum):
    ATTRACTING = "AttractingCurve"
    REPELLING = "RepellingCurve"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class NsFrame:
    delta2: float
    lam: complex
    lam_bar: complex
    sigma1: float
    sigma2: float
    #: d|lambda|/d delta at delta2, equal to -U/2
    d_mod: float
    #: U^2 != 2V (no 4th-root-of-unity resonance)
    no_strong_resonance_4: bool
    #: U^2 != 3V (no cube-root-of-unity resonance)
    no_strong_resonance_3: bool
    U: float
    V: float

    @property
    def resonance_ok(self) -> bool:
        return self.no_strong_resonance_4 and self.no_strong_resonance_3


@dataclass(frozen=True)
class NsReport:
    frame: NsFrame
    varsigma1: complex
    varsigma2: complex
    varsigma3: complex
    varsigma4: complex
    psi: float
    verdict: NsVerdict
    #: second and third partials of both frame components at the origin
    g_partials: dict[str, float]
    coeffs: TaylorCoeffs


def ns_frame(cfg: MapConfig, E: State) -> NsFrame:
    """Critical step size and eigenvalue pair; ``cfg.delta`` is irrelevant
    because ``U`` and ``V`` do not depend on it."""
    cd = char_data(jacobian(cfg, E), cfg)
    U, V = cd.U, cd.V
    if not (V > 0 and -2 * math.sqrt(V) < U < 0):
        raise NotInNsRegion(f"no complex unit-circle crossing: U={U:.6g}, V={V:.6g}")
    delta2 = -U / V
    sigma1 = 1 + U * delta2 / 2
    sigma2 = delta2 / 2 * math.sqrt(4 * V - U * U)
    lam = complex(sigma1, sigma2)
    u2 = U * U
    return NsFrame(
        delta2=delta2, lam=lam, lam_bar=lam.conjugate(), sigma1=sigma1, sigma2=sigma2,
        d_mod=-U / 2,
        no_strong_resonance_4=abs(u2 - 2 * V) > RESONANCE_TOL * max(u2, 2 * V),
        no_strong_resonance_3=abs(u2 - 3 * V) > RESONANCE_TOL * max(u2, 3 * V),
        U=U, V=V,
    )


def frame_matrix(tc: TaylorCoeffs, sigma1: float, sigma2: float) -> np.ndarray:
    return np.array([[tc.i010, 0.0], [sigma1 - tc.i100, -sigma2]])


G_PARTIAL_NAMES = ("MM", "MC", "CC", "MMM", "MMC", "MCC", "CCC")


def g_partials(tc: TaylorCoeffs, sigma1: float, sigma2: float) -> dict[str, float]:
    """Second and third partials at the origin of the map in the rotation frame.

    Keys are ``g3_MM``, ``g4_MCC`` and so on; ``M``/``C`` stand for the frame
    coordinates.
    """
    if abs(tc.i010) < DEGENERATE_TOL or abs(sigma2) < DEGENERATE_TOL:
        raise DegenerateTransform(f"frame singular: i010={tc.i010:.3e}, sigma2={sigma2:.3e}")
    g3, g4 = transform_map(tc.polys(), frame_matrix(tc, sigma1, sigma2))
    out = {}
    for label, poly in (("g3", g3), ("g4", g4)):
        for name in G_PARTIAL_NAMES:
            out[f"{label}_{name}"] = float(partial(poly, name.count("M"), name.count("C")))
    return out


def varsigmas(gp: dict[str, float]) -> tuple[complex, complex, complex, complex]:
    f = lambda n: gp["g3_" + n]
    g = lambda n: gp["g4_" + n]
    s1 = complex(f("MM") - f("CC") + 2 * g("MC"), g("MM") - g("CC") - 2 * f("MC")) / 8
    s2 = complex(f("MM") + f("CC"), g("MM") + g("CC")) / 4
    s3 = complex(f("MM") - f("CC") - 2 * g("MC"), g("MM") - g("CC") + 2 * f("MC")) / 8
    s4 = complex(f("MMM") + f("MCC") + g("MMC") + g("CCC"),
                 g("MMM") + g("MCC") - f("MMC") - f("CCC")) / 16
    return s1, s2, s3, s4


def psi_value(lam: complex, s1: complex, s2: complex, s3: complex, s4: complex) -> float:
    lb = lam.conjugate()
    return (-((1 - 2 * lam) * lb**2 / (1 - lam) * s1 * s2).real
            - 0.5 * abs(s2) ** 2 - abs(s3) ** 2 + (lb * s4).real)


def ns_discriminant(cfg: MapConfig, E: State, check_fixed: bool = True) -> NsReport:
    frame = ns_frame(cfg, E)
    tc = taylor_coeffs(cfg.with_delta(frame.delta2), E, check_fixed=check_fixed)
    gp = g_partials(tc, frame.sigma1, frame.sigma2)
    s1, s2, s3, s4 = varsigmas(gp)
    psi = psi_value(frame.lam, s1, s2, s3, s4)
    if abs(psi) < PSI_TOL or not frame.resonance_ok:
        verdict = NsVerdict.DEGENERATE
    else:
        verdict = NsVerdict.ATTRACTING if psi < 0 else NsVerdict.REPELLING
    return NsReport(frame, s1, s2, s3, s4, psi, verdict, gp, tc)
