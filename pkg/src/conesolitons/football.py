"""Two-angle boundary value problem for compact shrinking solitons.

On a closed orbit of the normalized shrinking system the first integral at the
two tips gives ``|y| = k e^{y-1}`` with ``y = 1 - 2w``.  The two positive roots
``y1 = 1 - p`` and ``y2 = 1 + q`` fix the ratio of the cone angles, ``p/q``,
and then the gradient constant ``a = pi p / alpha1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from .errors import ClosureResidualTooLarge, DegenerateTangency
from .geometry import ClosedForm, RadialProfile
from .integrate import Trajectory
from .soliton import SolitonSpec, first_integral, orbit

TWO_PI = 2.0 * math.pi
ROOT_XTOL = 1e-15


@dataclass
class FootballSolution:
    alpha1: float
    alpha2: float
    k: float
    p: float
    q: float
    a: float
    A: float
    orbit: Optional[Trajectory] = None
    closure_residual: float = 0.0
    spherical: bool = False

    def profile_fn(self):
        """Closed-form ``h`` for the spherical branch, else dense output of the orbit."""
        if self.spherical:
            c = math.sqrt(2.0) * self.alpha1 / TWO_PI
            return lambda r: c * np.sin(np.asarray(r) / math.sqrt(2.0))
        return lambda r: self.orbit.sample(r)[..., 0]


def _g(y, k):
    return y - k * math.exp(y - 1.0)


def positive_roots(k):
    """Roots ``y1 in (0, 1)`` and ``y2 in (1, inf)`` of ``y = k e^{y-1}``."""
    if not (0.0 < k < 1.0):
        raise DegenerateTangency(f"k={k}: the two positive roots exist only for 0 < k < 1")
    y1 = bisect(_g, 0.0, 1.0, args=(k,), xtol=ROOT_XTOL, maxiter=400)
    hi = 2.0
    while _g(hi, k) > 0.0:
        hi *= 2.0
    y2 = bisect(_g, 1.0, hi, args=(k,), xtol=ROOT_XTOL, maxiter=400)
    return y1, y2


def psi(k):
    """Ratio ``p / q = (1 - y1) / (y2 - 1)``."""
    y1, y2 = positive_roots(k)
    return (1.0 - y1) / (y2 - 1.0)


def psi_inverse(ratio, tol=1e-10):
    """``k`` with ``psi(k) = ratio`` by bisection (``psi`` is increasing)."""
    if not (0.0 < ratio < 1.0):
        raise ValueError("ratio must lie in (0, 1)")
    lo, hi = 1e-300, 1.0 - 1e-15
    k = 0.5 * (lo + hi)
    for _ in range(200):
        k = 0.5 * (lo + hi)
        val = psi(k)
        if abs(val - ratio) <= tol:
            break
        if val < ratio:
            lo = k
        else:
            hi = k
    return k


def solve_angles(alpha1, alpha2, tol=1e-10, closure_tol=1e-6):
    """Shrinking soliton with tip angles ``alpha1`` and ``alpha2`` (radians).

    The angles are sorted so the orbit starts at the smaller one.  Equal angles
    give the constant-curvature football ``h = c sin(r / sqrt 2)`` with the
    sentinel ``a = 0``.
    """
    if not (alpha1 > 0 and alpha2 > 0):
        raise ValueError("cone angles must be positive")
    a1, a2 = sorted((float(alpha1), float(alpha2)))
    if a1 == a2:
        return FootballSolution(a1, a2, k=1.0, p=0.0, q=0.0, a=0.0, A=math.pi * math.sqrt(2.0), spherical=True)
    k = psi_inverse(a1 / a2)
    y1, y2 = positive_roots(k)
    p, q = 1.0 - y1, y2 - 1.0
    a = math.pi * p / a1
    traj = orbit(SolitonSpec(-1, a, a1 / TWO_PI), tol=tol)
    tip = traj.tips()[0]
    sol = FootballSolution(a1, a2, k=k, p=p, q=q, a=a, A=tip.r - traj.params[0], orbit=traj)
    sol.closure_residual = abs(tip.u + a2 / TWO_PI)
    if sol.closure_residual > closure_tol:
        raise ClosureResidualTooLarge(f"closure residual {sol.closure_residual:.3e} exceeds {closure_tol:g}")
    return sol


def verify_orbit(sol: FootballSolution, tol=1e-11, a=None):
    """Independent re-integration: ``|u(A) + alpha2/2pi| + drift of H``.

    ``a`` overrides the gradient constant (used for sensitivity probes).
    """
    if sol.spherical and a is None:
        return 0.0
    a = sol.a if a is None else a
    spec = SolitonSpec(-1, a, sol.alpha1 / TWO_PI)
    traj = orbit(spec, tol=tol)
    tip = traj.tips()[0]
    H = first_integral(spec, (traj.h, traj.u))
    return abs(tip.u + sol.alpha2 / TWO_PI) + float(np.max(H) - np.min(H))


def football_profile(sol: FootballSolution, n=1024):
    """Orbit resampled on a uniform ``rho`` grid as a two-tip profile."""
    A = sol.A
    grid = np.linspace(0.0, A, n)
    h = np.asarray(sol.profile_fn()(grid), dtype=float)
    h[0] = h[-1] = 0.0
    cf = None
    if sol.spherical:
        c = math.sqrt(2.0) * sol.alpha1 / TWO_PI
        w = 1.0 / math.sqrt(2.0)
        cf = ClosedForm(
            "football",
            {"alpha1": sol.alpha1, "alpha2": sol.alpha2},
            h=lambda x: c * np.sin(w * np.asarray(x)),
            dh=lambda x: c * w * np.cos(w * np.asarray(x)),
            d2h=lambda x: -c * w**2 * np.sin(w * np.asarray(x)),
            d3h=lambda x: -c * w**3 * np.cos(w * np.asarray(x)),
        )
    return RadialProfile(grid, h, angle0=sol.alpha1, angleA=sol.alpha2, closed_form=cf)
