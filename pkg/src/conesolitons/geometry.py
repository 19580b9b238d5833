"""Rotationally symmetric surface metrics.

Two representations are used throughout:

* geodesic polar form ``drho^2 + h(rho)^2 dtheta^2`` (:class:`RadialProfile`),
* conformal form ``exp(2u) (dr^2 + r^2 dtheta^2)`` with ``u = a(r) + beta ln r``
  (:class:`ConformalProfile`).

A zero of ``h`` at an end of the grid is a tip; its cone angle is ``2 pi |h'|``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import (
    BetaOutOfRange,
    GridTooCoarse,
    NoTip,
    NonIntegrableFactor,
    NonPositiveProfile,
    NotEmbeddable,
)

TWO_PI = 2.0 * math.pi
_ZERO_TOL = 1e-12


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedForm:
    """Analytic profile ``h`` with its derivatives (``d3h`` only used at tips)."""

    name: str
    params: dict
    h: Callable
    dh: Callable
    d2h: Callable
    d3h: Optional[Callable] = None


@dataclass(frozen=True)
class RadialProfile:
    grid: np.ndarray
    values: np.ndarray
    angle0: Optional[float] = None
    angleA: Optional[float] = None
    closed_form: Optional[ClosedForm] = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if grid.size and grid[0] < 0:
            raise ValueError("radii must be nonnegative")
        scale = max(float(np.max(np.abs(values))), 1.0) if values.size else 1.0
        if self.angle0 is not None and abs(values[0]) > _ZERO_TOL * scale:
            raise ValueError("angle0 given but h(grid[0]) != 0")
        if self.angleA is not None and abs(values[-1]) > _ZERO_TOL * scale:
            raise ValueError("angleA given but h(grid[-1]) != 0")

    @property
    def n(self):
        return self.grid.size

    @property
    def left_tip(self):
        return _is_zero(self.values, 0)

    @property
    def right_tip(self):
        return _is_zero(self.values, -1)

    def area(self):
        """Total area ``2 pi int h drho``."""
        return TWO_PI * float(np.trapezoid(self.values, self.grid))


@dataclass(frozen=True)
class ConformalProfile:
    """Conformal factor ``u(r) = a(r) + beta ln r`` on ``(0, r_max]``.

    ``a_fn`` must be bounded on the domain (the cusp is the one exception and
    is flagged by ``name == "cusp"``).  ``da_fn`` and ``d2a_fn`` are optional
    exact derivatives.
    """

    beta: float
    a_fn: Callable
    name: str = "sampled"
    r_max: float = 1.0
    da_fn: Optional[Callable] = None
    d2a_fn: Optional[Callable] = None
    a0: Optional[float] = None  # limit a(0+), when known

    def __post_init__(self):
        if self.name != "cusp":
            _check_beta(self.beta)

    def u(self, r):
        r = np.asarray(r, dtype=float)
        return self.a_fn(r) + self.beta * np.log(r)

    @classmethod
    def from_samples(cls, r, a, beta, name="sampled"):
        r = np.asarray(r, dtype=float)
        a = np.asarray(a, dtype=float)
        if np.any(~np.isfinite(a)):
            raise ValueError("a must be finite")

        def a_fn(x):
            return np.interp(x, r, a)

        return cls(beta=float(beta), a_fn=a_fn, name=name, r_max=float(r[-1]), a0=float(a[0]))


@dataclass(frozen=True)
class ConicEuler:
    genus_chi: int
    betas: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        for b in self.betas:
            _check_beta(b)


class Admissibility(enum.Enum):
    ADMISSIBLE = "Admissible"
    NOT_ADMISSIBLE = "NotAdmissible"
    BOUNDARY_CASE = "BoundaryCase"


class ConeKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERICAL = "spherical"
    HYPERBOLIC = "hyperbolic"
    CUSP = "cusp"


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _check_beta(beta):
    if not (-1.0 < beta <= 0.0):
        raise BetaOutOfRange(f"cone exponent beta={beta} outside (-1, 0]")


def _is_zero(values, idx):
    scale = max(float(np.max(np.abs(values))), 1.0)
    return abs(values[idx]) <= _ZERO_TOL * scale


def fd_weights(x0, xs, m):
    """Finite-difference weights for the ``m``-th derivative at ``x0`` (Fornberg)."""
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def second_derivative(x, y):
    """Second-order accurate ``y''`` on a (possibly nonuniform) grid."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise GridTooCoarse("need at least 4 points for a second derivative")
    dm = x[1:-1] - x[:-2]
    dp = x[2:] - x[1:-1]
    out = np.empty_like(y)
    out[1:-1] = 2.0 * ((y[2:] - y[1:-1]) / dp - (y[1:-1] - y[:-2]) / dm) / (dm + dp)
    out[0] = fd_weights(x[0], x[:4], 2) @ y[:4]
    out[-1] = fd_weights(x[-1], x[-4:], 2) @ y[-4:]
    return out


def first_derivative(x, y):
    return np.gradient(np.asarray(y, dtype=float), np.asarray(x, dtype=float), edge_order=2)


def tip_slope(grid, values, end="left"):
    """One-sided slope at a tip from an odd fit ``s t + c t^3 + e t^5``.

    The fit uses the three nodes next to the tip, excluding the tip itself.
    """
    if end == "left":
        t = grid[1:4] - grid[0]
        y = values[1:4]
    else:
        t = grid[-1] - grid[-4:-1][::-1]
        y = values[-4:-1][::-1]
    A = np.column_stack([t, t**3, t**5])
    s = np.linalg.solve(A, y)[0]
    return float(s) if end == "left" else -float(s)


def derivatives(p: RadialProfile):
    """Return ``(h', h'')`` on the grid, exact when a closed form is attached."""
    if p.n < 3:
        raise GridTooCoarse("profile needs at least 3 grid points")
    if p.closed_form is not None:
        cf = p.closed_form
        return np.asarray(cf.dh(p.grid), dtype=float), np.asarray(cf.d2h(p.grid), dtype=float)
    if p.n < 4:
        raise GridTooCoarse("sampled profile needs at least 4 grid points")
    return first_derivative(p.grid, p.values), second_derivative(p.grid, p.values)


def _extrapolate_tip(rho, K, end):
    # K is even in the distance to the tip: K ~ K0 + c t^2 from the two nearest interior nodes.
    if end == "left":
        t1, t2 = rho[1] - rho[0], rho[2] - rho[0]
        k1, k2 = K[1], K[2]
    else:
        t1, t2 = rho[-1] - rho[-2], rho[-1] - rho[-3]
        k1, k2 = K[-2], K[-3]
    return (k1 * t2**2 - k2 * t1**2) / (t2**2 - t1**2)


# ---------------------------------------------------------------------------
# Curvature, angles, Gauss-Bonnet
# ---------------------------------------------------------------------------


def curvature(p: RadialProfile):
    """Gaussian curvature ``K = -h''/h``; tips use the one-sided limit."""
    if p.n < 3:
        raise GridTooCoarse("profile needs at least 3 grid points")
    h = p.values
    if np.any(h[1:-1] <= 0):
        raise NonPositiveProfile("h must be positive in the interior")
    _, d2h = derivatives(p)
    K = np.empty_like(h)
    inner = slice(1, p.n - 1)
    K[inner] = -d2h[inner] / h[inner]
    for idx, end in ((0, "left"), (-1, "right")):
        if _is_zero(h, idx):
            cf = p.closed_form
            if cf is not None and cf.d3h is not None:
                x = p.grid[idx]
                K[idx] = -float(cf.d3h(x)) / float(cf.dh(x))
            else:
                K[idx] = _extrapolate_tip(p.grid, K, end)
        else:
            K[idx] = -d2h[idx] / h[idx]
    return K


def cone_angles(p: RadialProfile):
    """Cone angles ``(alpha0, alphaA)`` in radians; ``None`` where there is no tip."""
    left, right = p.left_tip, p.right_tip
    if not (left or right):
        raise NoTip("profile has no zero at either end")
    cf = p.closed_form
    a0 = aA = None
    if left:
        s = float(cf.dh(p.grid[0])) if cf is not None else tip_slope(p.grid, p.values, "left")
        a0 = TWO_PI * s
    if right:
        s = float(cf.dh(p.grid[-1])) if cf is not None else tip_slope(p.grid, p.values, "right")
        aA = -TWO_PI * s
    return a0, aA


def gauss_bonnet(p: RadialProfile):
    """Total curvature ``2 pi int K h drho`` by the trapezoid rule."""
    K = curvature(p)
    return TWO_PI * float(np.trapezoid(K * p.values, p.grid))


def conic_euler(ce: ConicEuler):
    return ce.genus_chi + math.fsum(ce.betas)


def troyanov_admissible(ce: ConicEuler, atol=1e-12):
    """Constant-curvature admissibility of a cone surface.

    Equality in ``beta_i > sum_{j != i} beta_j`` is reported as
    :attr:`Admissibility.BOUNDARY_CASE`.
    """
    chi_hat = conic_euler(ce)
    if chi_hat <= 0:
        return Admissibility.ADMISSIBLE
    total = math.fsum(ce.betas)
    boundary = False
    for b in ce.betas:
        rest = total - b
        if abs(b - rest) <= atol:
            boundary = True
        elif b < rest:
            return Admissibility.NOT_ADMISSIBLE
    return Admissibility.BOUNDARY_CASE if boundary else Admissibility.ADMISSIBLE


# ---------------------------------------------------------------------------
# Conformal cones
# ---------------------------------------------------------------------------


def canonical_cone_metric(kind, beta=0.0):
    """Closed-form conformal factor of a constant-curvature cone.

    Euclidean (K=0), spherical (K=1), hyperbolic (K=-1, r<1) and the
    hyperbolic cusp ``u = -ln(r |ln r|)`` which ignores ``beta``.
    """
    kind = ConeKind(kind) if not isinstance(kind, ConeKind) else kind
    if kind is ConeKind.CUSP:
        return ConformalProfile(
            beta=-1.0,
            a_fn=lambda r: -np.log(np.abs(np.log(r))),
            name="cusp",
            r_max=1.0,
            da_fn=lambda r: -1.0 / (r * np.log(r)),
        )
    _check_beta(beta)
    b1 = beta + 1.0
    if kind is ConeKind.EUCLIDEAN:
        c = math.log(b1)
        return ConformalProfile(
            beta=beta,
            a_fn=lambda r: np.full_like(np.asarray(r, dtype=float), c),
            name="euclidean",
            r_max=math.inf,
            da_fn=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            d2a_fn=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            a0=c,
        )
    c = math.log(2.0 * b1)
    if kind is ConeKind.SPHERICAL:
        return ConformalProfile(
            beta=beta,
            a_fn=lambda r: c - np.log1p(np.asarray(r, dtype=float) ** (2 * b1)),
            name="spherical",
            r_max=math.inf,
            da_fn=lambda r: -2 * b1 * r ** (2 * b1 - 1) / (1 + r ** (2 * b1)),
            a0=c,
        )
    # |1 - r^(2(beta+1))| keeps the argument positive on r < 1.
    return ConformalProfile(
        beta=beta,
        a_fn=lambda r: c - np.log(np.abs(1.0 - np.asarray(r, dtype=float) ** (2 * b1))),
        name="hyperbolic",
        r_max=1.0,
        da_fn=lambda r: 2 * b1 * r ** (2 * b1 - 1) / (1 - r ** (2 * b1)),
        a0=c,
    )


def conformal_to_polar(c: ConformalProfile, r_max, n=10_000):
    """Convert ``exp(2u)|dz|^2`` into geodesic polar form.

    ``rho(r) = int_0^r e^u`` is computed in the variable ``x = r^(beta+1)``,
    where ``e^u dr = e^a dx / (beta+1)`` is bounded, so the trapezoid rule
    integrates the ``r^beta`` endpoint singularity through the local model
    ``e^{a(0+)} r^(beta+1) / (beta+1)``.  ``h = r e^u``.
    """
    if c.beta <= -1.0:
        raise NonIntegrableFactor("conformal factor is not integrable at r=0 (beta <= -1)")
    if r_max > c.r_max or (c.r_max == 1.0 and c.name == "hyperbolic" and r_max >= 1.0):
        raise ValueError(f"r_max={r_max} outside the domain of {c.name}")
    b1 = c.beta + 1.0
    x = np.linspace(0.0, r_max**b1, n)
    r = x ** (1.0 / b1)
    a = np.empty(n)
    a[1:] = c.a_fn(r[1:])
    a[0] = c.a0 if c.a0 is not None else float(c.a_fn(np.array([r[1] * 1e-6]))[0])
    ea = np.exp(a)
    if not np.all(np.isfinite(ea)):
        raise NonIntegrableFactor("conformal factor diverges on the grid")
    rho = cumulative_trapezoid(ea / b1, x, initial=0.0)
    h = ea * x
    h[0] = 0.0
    angle = TWO_PI * b1
    return RadialProfile(grid=rho, values=h, angle0=angle)


# ---------------------------------------------------------------------------
# Embedding
# ---------------------------------------------------------------------------


def embed_profile(p: RadialProfile, slope_tol=1e-12):
    """Meridian ``(h, z)`` of a surface of revolution with metric ``p``.

    Each grid cell becomes a chord of length ``drho``, so
    ``dz = sqrt(drho^2 - dh^2)`` (a second-order approximation of
    ``int sqrt(1 - h'^2)``) and the first fundamental form is matched cell by cell.
    """
    dh, _ = derivatives(p) if p.n >= 4 or p.closed_form is not None else (first_derivative(p.grid, p.values), None)
    if p.closed_form is None and p.n >= 4:
        # One-sided differences overshoot |h'| = 1 at smooth tips; the odd fit does not.
        dh = dh.copy()
        for idx, end in ((0, "left"), (-1, "right")):
            if _is_zero(p.values, idx):
                dh[idx] = tip_slope(p.grid, p.values, end)
    bad = np.nonzero(np.abs(dh) > 1.0 + slope_tol)[0]
    drho = np.diff(p.grid)
    dhh = np.diff(p.values)
    bad_cell = np.nonzero(np.abs(dhh) > drho * (1.0 + slope_tol))[0]
    if bad.size or bad_cell.size:
        idx = min(bad[0] if bad.size else p.n, bad_cell[0] if bad_cell.size else p.n)
        slope = dh[idx] if idx < p.n else dhh[idx] / drho[idx]
        raise NotEmbeddable(idx, slope)
    dz = np.sqrt(np.clip(drho**2 - dhh**2, 0.0, None))
    z = np.concatenate([[0.0], np.cumsum(dz)])
    return p.values.copy(), z


# ---------------------------------------------------------------------------
# Closed-form profiles
# ---------------------------------------------------------------------------


def sphere_profile(n=512, scale=1.0):
    """Spherical football ``h = scale sin(rho)`` on ``[0, pi]`` (round sphere at scale=1)."""
    cf = ClosedForm(
        "sphere",
        {"scale": scale},
        h=lambda x: scale * np.sin(x),
        dh=lambda x: scale * np.cos(x),
        d2h=lambda x: -scale * np.sin(x),
        d3h=lambda x: -scale * np.cos(x),
    )
    grid = np.linspace(0.0, math.pi, n)
    h = cf.h(grid)
    h[0] = h[-1] = 0.0
    angle = TWO_PI * scale
    return RadialProfile(grid, h, angle0=angle, angleA=angle, closed_form=cf)


def flat_cone_profile(alpha, rho_max=1.0, n=512):
    s = alpha / TWO_PI
    cf = ClosedForm(
        "flatcone",
        {"alpha": alpha},
        h=lambda x: s * np.asarray(x, dtype=float),
        dh=lambda x: np.full_like(np.asarray(x, dtype=float), s),
        d2h=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        d3h=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    )
    grid = np.linspace(0.0, rho_max, n)
    return RadialProfile(grid, cf.h(grid), angle0=alpha, closed_form=cf)


def cigar_profile(rho_max=10.0, n=1024, a=1.0):
    """Steady cigar ``h = sqrt(2/a) tanh(sqrt(a/2) rho)`` (tip slope 1, K(0) = a)."""
    c = math.sqrt(2.0 / a)
    k = math.sqrt(a / 2.0)

    def h(x):
        return c * np.tanh(k * np.asarray(x, dtype=float))

    def dh(x):
        return 1.0 / np.cosh(k * np.asarray(x, dtype=float)) ** 2

    def d2h(x):
        t = np.tanh(k * np.asarray(x, dtype=float))
        return -2.0 * k * t * (1.0 - t**2)

    def d3h(x):
        t = np.tanh(k * np.asarray(x, dtype=float))
        return -2.0 * k**2 * (1.0 - t**2) * (1.0 - 3.0 * t**2)

    cf = ClosedForm("cigar", {"a": a}, h=h, dh=dh, d2h=d2h, d3h=d3h)
    grid = np.linspace(0.0, rho_max, n)
    return RadialProfile(grid, h(grid), angle0=TWO_PI, closed_form=cf)


def spindle_profile(scale, tilt, n=512):
    """Two-tip profile ``scale sin(rho) (1 + tilt cos(rho))`` on ``[0, pi]``.

    Cone angles are ``2 pi scale (1 + tilt)`` and ``2 pi scale (1 - tilt)``; all
    even derivatives vanish at both tips.
    """
    if not (-1.0 < tilt < 1.0) or scale <= 0:
        raise ValueError("need scale > 0 and |tilt| < 1")

    def h(x):
        return scale * np.sin(x) * (1.0 + tilt * np.cos(x))

    def dh(x):
        return scale * (np.cos(x) + tilt * np.cos(2 * x))

    def d2h(x):
        return -scale * (np.sin(x) + 2 * tilt * np.sin(2 * x))

    def d3h(x):
        return -scale * (np.cos(x) + 4 * tilt * np.cos(2 * x))

    cf = ClosedForm("spindle", {"scale": scale, "tilt": tilt}, h=h, dh=dh, d2h=d2h, d3h=d3h)
    grid = np.linspace(0.0, math.pi, n)
    vals = h(grid)
    vals[0] = vals[-1] = 0.0
    return RadialProfile(
        grid,
        vals,
        angle0=TWO_PI * scale * (1 + tilt),
        angleA=TWO_PI * scale * (1 - tilt),
        closed_form=cf,
    )


def sampled(p: RadialProfile):
    """Drop the closed form so that derivatives come from finite differences."""
    return RadialProfile(p.grid, p.values, angle0=p.angle0, angleA=p.angleA)


def resample(p: RadialProfile, grid: Sequence[float]):
    grid = np.asarray(grid, dtype=float)
    if p.closed_form is not None:
        vals = np.asarray(p.closed_form.h(grid), dtype=float)
    else:
        vals = np.interp(grid, p.grid, p.values)
    if p.angle0 is not None:
        vals[0] = 0.0
    if p.angleA is not None:
        vals[-1] = 0.0
    return RadialProfile(grid, vals, angle0=p.angle0, angleA=p.angleA, closed_form=p.closed_form)
