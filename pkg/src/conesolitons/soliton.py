"""Rotationally symmetric gradient solitons on surfaces.

The soliton equation reduces to the planar system ``h' = u``,
``u' = (a u + eps/2) h`` with potential ``f' = a h`` and curvature
``K = -(a u + eps/2)``.  ``eps`` is -1 (shrinking), 0 (steady) or +1 (expanding).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchMismatch, OnSeparatrix, Unclassifiable
from .integrate import ASYMPTOTE, BLOWUP, TIP, Trajectory, integrate_system

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SolitonSpec:
    epsilon: int
    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise ValueError("epsilon must be -1, 0 or 1")
        # a = 0 is the constant-curvature convention, only meaningful to classify().
        if not self.a >= 0:
            raise ValueError("a must be nonnegative")


@dataclass(frozen=True)
class SolitonFamily:
    """Family label plus the named cone angles (radians)."""

    name: str
    angles: tuple = field(default_factory=tuple)  # ((label, radians), ...)

    def angle(self, label):
        return dict(self.angles)[label]

    def __str__(self):
        parts = [self.name]
        for label, rad in self.angles:
            parts.append(f"{label}={format_degrees(rad)}deg")
        return " ".join(parts)


def format_degrees(rad):
    deg = math.degrees(rad)
    text = f"{deg:.2f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


# ---------------------------------------------------------------------------
# System
# ---------------------------------------------------------------------------


def rhs(spec: SolitonSpec, state):
    h, u = state
    return (u, (spec.a * u + spec.epsilon / 2.0) * h)


def _augmented(spec):
    a, half = spec.a, spec.epsilon / 2.0

    def fun(r, y):
        h, u = y[0], y[1]
        return [u, (a * u + half) * h, a * h]

    return fun


def integrate(spec: SolitonSpec, init, r_span, tol=1e-10, max_u=1e6, tip_stop=None, asymptote=None):
    """Integrate from ``init = (h0, u0)``; the potential ``f`` is carried with ``f(r0) = 0``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    y0 = [float(init[0]), float(init[1]), 0.0]
    return integrate_system(
        _augmented(spec),
        y0,
        r_span,
        tol=tol,
        max_u=max_u,
        tip_stop=tip_stop,
        asymptote=asymptote,
        isocline_u=0.0,
        spec=spec,
    )


def first_integral(spec: SolitonSpec, state):
    """Conserved quantity of the system.

    Shrinking ``v^2 - 2w - ln|2w - 1|``, expanding ``v^2 - 2w + ln|2w + 1|``
    with ``v = a h`` and ``w = a u``; steady ``a h^2 / 2 - u``.
    """
    h, u = np.asarray(state[0], dtype=float), np.asarray(state[1], dtype=float)
    a = spec.a
    if spec.epsilon == 0:
        return a * h**2 / 2.0 - u
    v, w = a * h, a * u
    arg = np.abs(2.0 * w + spec.epsilon)
    if np.any(arg <= 4.0 * np.finfo(float).eps):
        raise OnSeparatrix("state lies on the invariant line a u = -eps/2")
    return v**2 - 2.0 * w + spec.epsilon * np.log(arg)


def steady_closed_form(a, C, branch, r, D=0.0):
    """Closed-form solution of ``h' = a h^2 / 2 + C``.

    tan (C > 0): ``sqrt(2C/a) tan(sqrt(aC/2) r + D)``;
    tanh (C < 0): ``-sqrt(-2C/a) tanh(sqrt(-aC/2) r + D)``;
    rational (C = 0): ``1 / (D - a r / 2)``.
    With ``D = 0`` the first two vanish at ``r = 0`` with slope ``C``.
    """
    r = np.asarray(r, dtype=float)
    if branch == "tan":
        if not C > 0:
            raise BranchMismatch("tan branch needs C > 0")
        return math.sqrt(2 * C / a) * np.tan(math.sqrt(a * C / 2) * r + D)
    if branch == "tanh":
        if not C < 0:
            raise BranchMismatch("tanh branch needs C < 0")
        return -math.sqrt(-2 * C / a) * np.tanh(math.sqrt(-a * C / 2) * r + D)
    if branch == "rational":
        if C != 0:
            raise BranchMismatch("rational branch needs C = 0")
        return 1.0 / (D - a * r / 2.0)
    raise ValueError(f"unknown branch {branch!r}")


def potential_along(t: Trajectory):
    """``f = a int h dr`` with ``f(r0) = 0``."""
    if t.potential is not None:
        return t.potential.copy()
    from scipy.integrate import cumulative_trapezoid

    return t.spec.a * cumulative_trapezoid(t.h, t.params, initial=0.0)


def curvature_along(t: Trajectory):
    return -(t.spec.a * t.u + t.spec.epsilon / 2.0)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifyConfig:
    slope_tol: float = 1e-6
    tol: float = 1e-10
    max_u: float = 1e6
    asymptote_tol: float = 1e-6
    r_limit: float = 1e3


def _direction(b):
    # Start on the side where h > 0.
    return 1.0 if b > 0 else -1.0


def classify(spec: SolitonSpec, config: ClassifyConfig = ClassifyConfig(), return_trajectory=False):
    """Assign the family of the soliton starting at the tip ``(h, u) = (0, b)``."""
    traj = None
    fam = None
    eps, a, b = spec.epsilon, spec.a, spec.b
    close = lambda x, y: abs(x - y) <= config.slope_tol  # noqa: E731

    if a == 0:
        fam = SolitonFamily("ConstantCurvature", (("alpha", TWO_PI * abs(b)),))
    elif b == 0 and eps != 1:
        raise Unclassifiable("b = 0 gives the trivial solution h = 0")
    elif eps == -1:
        s = abs(b)
        sgn = _direction(b)
        if close(a * b, 0.5):
            fam = SolitonFamily("ShrinkGaussianCone", (("alpha", math.pi / a),))
        else:
            traj = integrate(spec, (0.0, b), (0.0, sgn * config.r_limit), tol=config.tol,
                             max_u=config.max_u, tip_stop=1)
            if a * b > 0.5:
                if traj.status != BLOWUP:
                    raise Unclassifiable("expected curvature blow-up", traj.events)
                fam = SolitonFamily("UnboundedCurvature")
            else:
                tips = traj.tips()
                if not tips:
                    raise Unclassifiable("no second tip found", traj.events)
                s2 = abs(tips[0].u)
                if close(s, 1.0) or close(s2, 1.0):
                    other = s2 if close(s, 1.0) else s
                    fam = SolitonFamily("Teardrop", (("alpha", TWO_PI * other),))
                else:
                    fam = SolitonFamily("Football", (("alpha1", TWO_PI * s), ("alpha2", TWO_PI * s2)))
    elif eps == 0:
        if b > 0:
            traj = integrate(spec, (0.0, b), (0.0, config.r_limit), tol=config.tol, max_u=config.max_u)
            if traj.status != BLOWUP:
                raise Unclassifiable("expected curvature blow-up", traj.events)
            fam = SolitonFamily("UnboundedCurvature")
        else:
            traj = integrate(spec, (0.0, b), (0.0, -config.r_limit), tol=config.tol, max_u=config.max_u,
                             asymptote=(0.0, config.asymptote_tol))
            if traj.status != ASYMPTOTE:
                raise Unclassifiable("cylinder end not reached", traj.events)
            if close(b, -1.0):
                fam = SolitonFamily("Cigar")
            else:
                fam = SolitonFamily("ConeCigar", (("alpha", -TWO_PI * b),))
    else:  # expanding
        alpha = math.pi / a
        if b > 0:
            traj = integrate(spec, (0.0, b), (0.0, config.r_limit), tol=config.tol, max_u=config.max_u)
            if traj.status != BLOWUP:
                raise Unclassifiable("expected curvature blow-up", traj.events)
            fam = SolitonFamily("UnboundedCurvature")
        elif b == 0:
            fam = SolitonFamily("CuspedCone", (("alpha", alpha),))
        elif close(a * b, -0.5):
            fam = SolitonFamily("ExpandGaussianCone", (("alpha", -TWO_PI * b),))
        else:
            traj = integrate(spec, (0.0, b), (0.0, -config.r_limit), tol=config.tol, max_u=config.max_u,
                             asymptote=(-0.5 / a, config.asymptote_tol))
            if traj.status != ASYMPTOTE:
                raise Unclassifiable("asymptotic cone not reached", traj.events)
            if close(b, -1.0):
                fam = SolitonFamily("BluntCone", (("alpha", alpha),))
            else:
                fam = SolitonFamily("AlphaBetaCone", (("alpha", alpha), ("beta", -TWO_PI * b)))
    if return_trajectory:
        return fam, traj
    return fam


def orbit(spec: SolitonSpec, tol=1e-10, r_limit=1e3):
    """Closed shrinking orbit from ``(0, b)`` to the next tip, oriented so ``h > 0``."""
    sgn = _direction(spec.b)
    traj = integrate(spec, (0.0, spec.b), (0.0, sgn * r_limit), tol=tol, tip_stop=1)
    if traj.status != TIP:
        raise Unclassifiable("orbit does not close", traj.events)
    return traj


def trajectory_profile(traj: Trajectory, n=1024, length=None):
    """Profile ``h(rho)`` with ``rho = |r - r0|`` resampled on a uniform grid.

    Ends at the first tip crossing when there is one (a closed two-tip
    profile), otherwise at ``length`` or the last sample.
    """
    from .geometry import RadialProfile

    r0 = traj.params[0]
    tips = traj.tips()
    end = abs(tips[0].r - r0) if tips else abs(traj.params[-1] - r0)
    if length is not None:
        end = min(end, float(length))
    closed = bool(tips) and math.isclose(end, abs(tips[0].r - r0), rel_tol=1e-12)
    sgn = 1.0 if traj.params[-1] >= r0 else -1.0
    rho = np.linspace(0.0, end, n)
    h = np.abs(traj.sample(r0 + sgn * rho)[:, 0])
    h[0] = 0.0
    b = abs(traj.u[0])
    angleA = None
    if closed:
        h[-1] = 0.0
        angleA = TWO_PI * abs(tips[0].u)
    return RadialProfile(rho, h, angle0=TWO_PI * b, angleA=angleA)


def orbit_length(traj: Trajectory):
    tip = traj.tips()[0]
    return abs(tip.r - traj.params[0]), tip.u


# ---------------------------------------------------------------------------
# Phase portrait
# ---------------------------------------------------------------------------


def linearization(epsilon, a, point=(0.0, 0.0)):
    h, u = point
    J = np.array([[0.0, 1.0], [a * u + epsilon / 2.0, a * h]])
    vals, vecs = np.linalg.eig(J)
    order = np.argsort(-vals.real)
    return J, vals[order], vecs[:, order]


def _pairs(z):
    return [[float(np.real(x)), float(np.imag(x))] for x in np.ravel(z)]


def _run_sample(args):
    eps, a, h0, u0, span, tol = args
    spec = SolitonSpec(eps, a)
    out = []
    for end in (span, -span):
        t = integrate(spec, (h0, u0), (0.0, end), tol=tol, max_u=1e3)
        out.append((t.params, t.states))
    (rf, sf), (rb, sb) = out
    params = np.concatenate([rb[::-1], rf[1:]])
    states = np.concatenate([sb[::-1], sf[1:]])
    return (h0, u0), params, states


def phase_portrait(epsilon, a, samples, span=6.0, tol=1e-8, delta=1e-6, jobs=1):
    """Critical points, isoclines, sampled trajectories and separatrices.

    ``samples`` is a sequence of initial points ``(h, u)``.  The result does not
    depend on the order in which parallel jobs finish.
    """
    crit = []
    isoclines = {"vertical": [{"u": 0.0}], "horizontal": [{"h": 0.0}]}
    invariant_lines = []
    fixed_lines = []
    if epsilon == 0:
        fixed_lines.append({"u": 0.0})
    else:
        J, vals, vecs = linearization(epsilon, a)
        kind = "saddle" if epsilon > 0 else "center"
        crit.append(
            {
                "h": 0.0,
                "u": 0.0,
                "type": kind,
                "jacobian": J.tolist(),
                "eigenvalues": _pairs(vals),
                "eigenvectors": [_pairs(vecs[:, i]) for i in range(2)],
            }
        )
        line = -epsilon / (2.0 * a)
        isoclines["horizontal"].append({"u": line})
        invariant_lines.append({"u": line})

    tasks = [(epsilon, a, float(h), float(u), span, tol) for h, u in samples]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_sample, tasks))
    else:
        results = [_run_sample(t) for t in tasks]
    results.sort(key=lambda x: x[0])
    trajectories = [{"init": list(init), "r": r, "states": s} for init, r, s in results]

    separatrices = []
    if epsilon > 0:
        spec = SolitonSpec(epsilon, a)
        _, vals, vecs = linearization(epsilon, a)
        for i, lam in enumerate(vals.real):
            v = vecs[:, i].real
            v = v / np.linalg.norm(v)
            end = span if lam > 0 else -span
            for sign in (1.0, -1.0):
                t = integrate(spec, sign * delta * v, (0.0, end), tol=tol, max_u=1e3)
                separatrices.append(
                    {"eigenvalue": float(lam), "direction": (sign * v).tolist(), "r": t.params, "states": t.states}
                )
    return {
        "epsilon": epsilon,
        "a": a,
        "critical_points": crit,
        "fixed_point_lines": fixed_lines,
        "isoclines": isoclines,
        "invariant_lines": invariant_lines,
        "trajectories": trajectories,
        "separatrices": separatrices,
    }
