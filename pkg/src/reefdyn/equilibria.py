"""Fixed points of the reef map.

The coral nullcline ``alpha (1 - M - C) - d - a M = 0`` is a straight line,
``C(M) = 1 - d/alpha - M (alpha + a)/alpha``. Substituting it into the algae
nullcline leaves a scalar residual ``phi(M)`` whose zeros on the admissible
interval are exactly the interior equilibria. ``phi`` is concave in ``M`` so
there are at most two of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .model import ModelParams, State, rates

SCAN_CELLS = 4096
#: |phi| at an interior extremum below which the extremum is a double root.
TANGENCY_TOL = 1e-6
#: Minimum |phi''| for a tangency to count as an isolated double root.
MIN_CURVATURE = 1e-10


@dataclass(frozen=True)
class EquilibriumSet:
    trivial: State
    axial_M: State | None
    axial_C: State | None
    interior: list[State] = field(default_factory=list)

    def labelled(self) -> list[tuple[str, State]]:
        out = [("E0", self.trivial)]
        if self.axial_M is not None:
            out.append(("EA1", self.axial_M))
        if self.axial_C is not None:
            out.append(("EA2", self.axial_C))
        out.extend((f"E*{i + 1}", s) for i, s in enumerate(self.interior))
        return out


def axial_macroalgae(p: ModelParams) -> float:
    return (p.r - p.g + p.gamma) * p.k / (p.r + p.k * p.gamma)


def axial_coral(p: ModelParams) -> float:
    return 1 - p.d / p.alpha


def closed_form_equilibria(p: ModelParams) -> tuple[State, State | None, State | None]:
    """Trivial and axial fixed points; an axial point is omitted unless its
    cover lies strictly inside (0, 1)."""
    e0 = State(0.0, 0.0)
    ea1 = ea2 = None
    if p.r + p.k * p.gamma > 0:
        m_a = axial_macroalgae(p)
        if 0 < m_a < 1:
            ea1 = State(m_a, 0.0)
    c_a = axial_coral(p)
    if 0 < c_a < 1:
        ea2 = State(0.0, c_a)
    return e0, ea1, ea2


def coral_nullcline(p: ModelParams, M):
    return 1 - p.d / p.alpha - M * (p.alpha + p.a) / p.alpha


def nullcline_residual(p: ModelParams, M):
    """Algae-nullcline residual along the coral nullcline."""
    C = coral_nullcline(p, M)
    return p.r * (1 - M / p.k) + p.a * C - p.g / (1 - C) + p.gamma * (1 - M - C)


def admissible_interval(p: ModelParams) -> tuple[float, float] | None:
    """Open interval of M with M > 0, C(M) > 0 and M + C(M) < 1."""
    c0 = 1 - p.d / p.alpha
    slope = (p.alpha + p.a) / p.alpha  # C(M) = c0 - slope * M
    lo, hi = 0.0, np.inf
    # C(M) > 0
    if slope > 0:
        hi = min(hi, c0 / slope)
    elif c0 <= 0:
        return None
    # M + C(M) < 1  <=>  (1 - slope) M < 1 - c0
    if slope < 1:
        hi = min(hi, (1 - c0) / (1 - slope))
    elif slope > 1:
        lo = max(lo, (1 - c0) / (1 - slope))
    elif c0 >= 1:
        return None
    if not np.isfinite(hi) or hi <= lo:
        return None
    return lo, hi


def _admissible(p: ModelParams, M: float) -> bool:
    C = coral_nullcline(p, M)
    return M > 0 and C > 0 and M + C < 1


def interior_equilibria(p: ModelParams, cells: int = SCAN_CELLS,
                        tangency_tol: float = TANGENCY_TOL) -> list[State]:
    """All coexistence equilibria, sorted by ascending M.

    Sign changes of ``phi`` on a uniform grid are refined by a bracketing
    solver. Interior extrema of ``phi`` whose value is within ``tangency_tol``
    of zero are double roots: they are reported once, at the extremum, and any
    sign-change pair they split is absorbed into them.
    """
    span = admissible_interval(p)
    if span is None:
        return []
    lo, hi = span
    pad = 1e-12 * (hi - lo)
    grid = np.linspace(lo + pad, hi - pad, cells + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = nullcline_residual(p, grid)
    phi = lambda m: float(nullcline_residual(p, m))

    finite = np.isfinite(vals)
    roots = [float(m) for m in grid[finite & (vals == 0.0)]]
    prod = vals[:-1] * vals[1:]
    for i in np.nonzero(np.isfinite(prod) & (prod < 0))[0]:
        roots.append(brentq(phi, grid[i], grid[i + 1], xtol=1e-16, rtol=1e-15, maxiter=200))

    for m_ext, width in _tangencies(p, grid, vals, tangency_tol):
        roots = [m for m in roots if abs(m - m_ext) > width]
        roots.append(m_ext)

    out = [State(m, float(coral_nullcline(p, m))) for m in sorted(roots) if _admissible(p, m)]
    return out


def _tangencies(p, grid, vals, tol):
    """Interior extrema of phi with |phi| <= tol, with their absorption width."""
    found = []
    d = np.diff(vals)
    turn = np.nonzero(np.isfinite(d[:-1]) & np.isfinite(d[1:]) & (d[:-1] * d[1:] < 0))[0] + 1
    for i in turn:
        sign = 1.0 if d[i - 1] > 0 else -1.0  # +1: maximum
        a, b = grid[i - 1], grid[i + 1]
        res = minimize_scalar(lambda m: -sign * float(nullcline_residual(p, m)),
                              bounds=(a, b), method="bounded", options={"xatol": 1e-14})
        m_ext = float(res.x)
        val = float(nullcline_residual(p, m_ext))
        if abs(val) > tol:
            continue
        h = 1e-4 * (grid[-1] - grid[0])
        curv = (float(nullcline_residual(p, m_ext + h)) - 2 * val
                + float(nullcline_residual(p, m_ext - h))) / h**2
        if abs(curv) < MIN_CURVATURE:
            continue
        width = 1.01 * np.sqrt(2 * tol / abs(curv))
        found.append((m_ext, width))
    return found


def equilibria(p: ModelParams) -> EquilibriumSet:
    e0, ea1, ea2 = closed_form_equilibria(p)
    return EquilibriumSet(e0, ea1, ea2, interior_equilibria(p))


def residual(p: ModelParams, s: State) -> float:
    """Sup-norm of the vector field at ``s``."""
    dM, dC = rates(p, s.M, s.C)
    return max(abs(dM), abs(dC))
