"""Taylor expansion of the map about a fixed point.

In shifted coordinates ``x = M - M*``, ``y = C - C*`` and with the step
written as ``delta + e`` the map becomes

    x' = sum i_pqs x^p y^q e^s,    y' = sum j_pqs x^p y^q e^s

truncated at total order three in ``(x, y)`` and order one in ``e``. The
coefficients are monomial coefficients, not derivatives. Because the map is
``state + delta * rates`` every ``e`` coefficient is the matching rate
coefficient, i.e. the ``e = 0`` coefficient divided by ``delta`` (minus the
identity for the linear terms).

Two expansions are provided. ``"coupled"`` differentiates the planar map as
it is iterated. ``"frozen"`` holds the turf cover ``S = 1 - M* - C*`` fixed and
uses the grazing term ``g M / (M + S)``, which reproduces the per-coefficient
formulas traditionally quoted for this model but is not the expansion of the
iterated map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import NotAFixedPoint
from .equilibria import residual
from .model import MapConfig, State, _check_singular

MODES = ("coupled", "frozen")
FIXED_POINT_TOL = 1e-8

Poly = dict  # {(p, q, s): coefficient}


@dataclass(frozen=True)
class TaylorCoeffs:
    """Coefficients of the shifted map; index ``pqs`` is the power of (x, y, e)."""

    i100: float
    i010: float
    i200: float
    i020: float
    i110: float
    i300: float
    i120: float
    i030: float
    i101: float
    i011: float
    i201: float
    i301: float
    i111: float
    i021: float
    i121: float
    i031: float
    j100: float
    j010: float
    j020: float
    j110: float
    j101: float
    j011: float
    j021: float
    j111: float
    delta: float
    mode: str = "coupled"

    def polys(self) -> tuple[Poly, Poly]:
        """Both components as ``{(p, q, s): c}`` dictionaries."""
        out: tuple[Poly, Poly] = ({}, {})
        for f in fields(self):
            name = f.name
            if len(name) == 4 and name[0] in "ij" and name[1:].isdigit():
                key = tuple(int(c) for c in name[1:])
                out[0 if name[0] == "i" else 1][key] = getattr(self, name)
        return out

    def linear(self) -> np.ndarray:
        return np.array([[self.i100, self.i010], [self.j100, self.j010]])


def _with_e_terms(delta: float, base: dict[str, float]) -> dict[str, float]:
    out = dict(base)
    for name, v in base.items():
        e_name = name[:3] + "1"
        out[e_name] = (v - 1) / delta if name in ("i100", "j010") else v / delta
    return out


def taylor_coeffs(cfg: MapConfig, E: State, mode: str = "coupled",
                  check_fixed: bool = True) -> TaylorCoeffs:
    """Closed-form Taylor coefficients of the map about ``E``.

    ``check_fixed=False`` expands about an arbitrary point, which only makes
    sense for reproducing values quoted at rounded equilibria.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    p, dl = cfg.params, cfg.delta
    M, C = E.M, E.C
    _check_singular(C)
    if check_fixed:
        res = residual(p, E)
        if res * dl > FIXED_POINT_TOL:
            raise NotAFixedPoint(f"step residual {res * dl:.3e} at {E}")
    r, k, a, g, gm, al, d = p.r, p.k, p.a, p.g, p.gamma, p.alpha, p.d
    if mode == "coupled":
        s0 = 1 - C
        base = dict(
            i100=1 + dl * (r - 2 * r * M / k + a * C - g / s0 + gm - 2 * gm * M - gm * C),
            i010=dl * (a * M - g * M / s0**2 - gm * M),
            i200=-dl * (r / k + gm),
            i020=-dl * g * M / s0**3,
            i110=dl * (a - gm - g / s0**2),
            i300=0.0,
            i120=-dl * g / s0**3,
            i030=-dl * g * M / s0**4,
            j100=-dl * (al + a) * C,
            j010=1 + dl * (al - al * M - 2 * al * C - d - a * M),
            j020=-dl * al,
            j110=-dl * (al + a),
        )
    else:
        S = 1 - M - C
        u0 = M + S
        base = dict(
            i100=1 + dl * r - 2 * dl * r * M / k + dl * a * C - dl * S * g / u0**2 + dl * gm * S,
            i010=dl * a * M,
            i200=-dl * r / k + dl * S * g / u0**3,
            i020=0.0,
            i110=dl * a,
            i300=-dl * S * g / u0**4,
            i120=0.0,
            i030=0.0,
            j100=-dl * a * C,
            j010=1 + dl * al * S - dl * d - dl * a * M,
            j020=0.0,
            j110=-dl * a,
        )
    vals = _with_e_terms(dl, base)
    wanted = {f.name for f in fields(TaylorCoeffs)} - {"delta", "mode"}
    return TaylorCoeffs(**{n: vals.get(n, 0.0) for n in wanted}, delta=dl, mode=mode)


def substitute_linear(poly: Poly, P, order: int = 3) -> Poly:
    """Rewrite ``poly(x, y, e)`` in ``(u, v, e)`` where ``(x, y) = P (u, v)``.

    Terms above total order ``order`` in ``(u, v)`` are dropped.
    """
    P = np.asarray(P, dtype=float)
    out: Poly = {}
    for (p, q, s), c in poly.items():
        if p + q > order or c == 0:
            continue
        # (P00 u + P01 v)^p (P10 u + P11 v)^q
        for i in range(p + 1):
            ci = math.comb(p, i) * P[0, 0] ** i * P[0, 1] ** (p - i)
            for j in range(q + 1):
                cj = math.comb(q, j) * P[1, 0] ** j * P[1, 1] ** (q - j)
                key = (i + j, p + q - i - j, s)
                out[key] = out.get(key, 0.0) + c * ci * cj
    return out


def transform_map(polys: tuple[Poly, Poly], P) -> tuple[Poly, Poly]:
    """Conjugate a planar polynomial map by ``(x, y) = P (u, v)``."""
    Pinv = np.linalg.inv(np.asarray(P, dtype=float))
    sub = [substitute_linear(f, P) for f in polys]
    out: tuple[Poly, Poly] = ({}, {})
    for row in range(2):
        for col in range(2):
            w = Pinv[row, col]
            for key, c in sub[col].items():
                out[row][key] = float(out[row].get(key, 0.0) + w * c)
    return out


def partial(poly: Poly, p: int, q: int, s: int = 0) -> float:
    """Mixed partial derivative at the origin of a monomial dictionary."""
    return math.factorial(p) * math.factorial(q) * math.factorial(s) * poly.get((p, q, s), 0.0)
