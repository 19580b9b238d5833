"""Expanding gradient soliton on R x T^2 with metric dr^2 + e^{2h(r)}(dx^2 + dy^2).

With ``H = h'`` and ``F = f'`` the soliton equations reduce to

    H' = H F - 2 H^2 + 1/2,      F' = 2 H F - 2 H^2 + 1/2.

The soliton is the unstable separatrix of the saddle ``(1/2, 0)`` entering
``{H < 1/2, F < 0}``.  Sectional curvatures are ``sec_xy = -H^2`` and
``sec_rx = sec_ry = -(H^2 + H') = -(F' + 1/2)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import LeftAdmissibleRegion, NotCritical, TailTooShort

SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class CuspConfig:
    delta: float = 1e-6
    H_stop: float = 1e-4
    r_back: float = 20.0  # linearized tail; much longer and sec rounds to exactly -1/4
    tol: float = 1e-10
    method: str = "LSODA"


@dataclass
class CuspTrajectory:
    r: np.ndarray  # gauge: r = 0 where H = 1/4
    H: np.ndarray
    F: np.ndarray
    h: np.ndarray
    f: np.ndarray
    delta: float
    isocline_events: list = field(default_factory=list)
    S: Optional[np.ndarray] = None  # sec_rx integrated directly


@dataclass
class CuspMetric:
    r: np.ndarray
    h: np.ndarray
    f: np.ndarray
    H: np.ndarray
    F: np.ndarray
    sec_xy: np.ndarray
    sec_rx: np.ndarray
    sec_rx_alt: np.ndarray


def cusp_rhs(state):
    H, F = state[0], state[1]
    return (H * F - 2 * H * H + 0.5, 2 * H * F - 2 * H * H + 0.5)


def _hs_rhs(r, y):
    # Unknowns (H, S, h, f) with S = sec_rx = H^2 - H F - 1/2.  In the tail
    # S ~ -2/r^4, far below the rounding error of -(F' + 1/2)/2, so S is
    # integrated directly: S' = S (F - H) - H^3.
    H, S = y[0], y[1]
    F = (H * H - S - 0.5) / H
    return [-S - H * H, S * (F - H) - H**3, H, F]


def _hs_jac(r, y):
    H, S = y[0], y[1]
    F = (H * H - S - 0.5) / H
    dF_dH = 1.0 + (S + 0.5) / (H * H)
    dF_dS = -1.0 / H
    return [
        [-2 * H, -1.0, 0, 0],
        [S * (dF_dH - 1.0) - 3 * H * H, (F - H) + S * dF_dS, 0, 0],
        [1.0, 0, 0, 0],
        [dF_dH, dF_dS, 0, 0],
    ]


def sec_rx_from(H, F):
    return H * H - H * F - 0.5


def linearize(point, atol=1e-12):
    """Jacobian and eigen-data at a critical point ``(+-1/2, 0)``.

    Eigenvalues are returned in closed form, ordered (unstable, stable);
    ``slopes`` are the ``dF/dH`` slopes of the eigenvectors.
    """
    H, F = float(point[0]), float(point[1])
    dH, dF = cusp_rhs((H, F))
    if abs(dH) > atol or abs(dF) > atol:
        raise NotCritical(f"({H}, {F}) is not a critical point")
    J = np.array([[F - 4 * H, H], [2 * F - 4 * H, 2 * H]])
    sign = 1.0 if H > 0 else -1.0
    # Characteristic polynomial at (+-1/2, 0): l^2 +- l - 1 = 0.
    vals = np.array([(-1 + SQRT5) / 2, (-1 - SQRT5) / 2]) * sign
    if sign < 0:
        vals = vals[::-1]  # keep the unstable (positive) eigenvalue first
    vecs = []
    slopes = []
    for lam in vals:
        # First row: (J00 - lam) x + J01 y = 0.
        slope = (lam - J[0, 0]) / J[0, 1]
        v = np.array([1.0, slope]) / math.hypot(1.0, slope)
        vecs.append(v)
        slopes.append(slope)
    return {"matrix": J, "eigenvalues": vals, "eigenvectors": np.array(vecs), "slopes": np.array(slopes)}


def _events(H_stop):
    def stop(r, y):
        return y[0] - H_stop

    stop.terminal = True
    stop.direction = -1

    def quarter(r, y):
        return y[0] - 0.25

    def leave_high(r, y):
        return 0.5 - y[0]

    leave_high.terminal = True

    def leave_F(r, y):
        # F <= 0  <=>  H^2 - S - 1/2 <= 0 while H > 0.
        return -(y[0] * y[0] - y[1] - 0.5)

    leave_F.terminal = True
    return [stop, quarter, leave_high, leave_F]


def shoot_separatrix(config: CuspConfig = CuspConfig(), mirrored=False):
    """Unstable separatrix from ``(1/2, 0)`` into ``{H < 1/2, F < 0}``.

    Integrated forward until ``H < H_stop`` and backward toward the saddle.
    The ``r`` origin is moved to the crossing ``H = 1/4`` so it does not depend
    on ``delta``; ``h(r_min) = r_min / 2`` and ``f(r_min) = 0``.
    With ``mirrored`` the data are mapped by ``(H, F, r) -> (-H, -F, -r)``.
    """
    lin = linearize((0.5, 0.0))
    v = lin["eigenvectors"][0]
    v = -v if v[0] > 0 else v  # point into H < 1/2 (and F < 0)
    H0, F0 = 0.5 + config.delta * v[0], config.delta * v[1]
    y0 = [H0, sec_rx_from(H0, F0), 0.0, 0.0]
    # S decays like r^-4, so its absolute tolerance must be far below double eps.
    atol = np.array([config.tol * 1e-2, 1e-40, config.tol, config.tol])
    kw = dict(method=config.method, rtol=config.tol, atol=atol, dense_output=False)
    if config.method in ("Radau", "BDF", "LSODA"):
        kw["jac"] = _hs_jac
    ev = _events(config.H_stop)
    fwd = solve_ivp(_hs_rhs, (0.0, 1e7), y0, events=ev, **kw)
    if fwd.t_events[2].size or fwd.t_events[3].size:
        raise LeftAdmissibleRegion("separatrix left 0 < H < 1/2, F <= 0; reduce delta")
    if fwd.status != 1 or not fwd.t_events[0].size:
        raise TailTooShort("forward shoot did not reach H_stop")
    if not fwd.t_events[1].size:
        raise TailTooShort("no H = 1/4 crossing")
    r_quarter = float(fwd.t_events[1][0])
    # Backward in r the stable direction is amplified like e^{1.6|r|}, so the
    # tail toward the saddle comes from the linearization (error O(delta^2)).
    lam = float(lin["eigenvalues"][0])
    rb = np.linspace(-config.r_back, 0.0, int(config.r_back * 8) + 1)
    grow = np.exp(lam * rb)
    Hb = 0.5 + config.delta * v[0] * grow
    Fb = config.delta * v[1] * grow
    bwd = np.vstack(
        [
            Hb,
            sec_rx_from(Hb, Fb),
            0.5 * rb + config.delta * v[0] * (grow - 1.0) / lam,
            config.delta * v[1] * (grow - 1.0) / lam,
        ]
    )
    r = np.concatenate([rb[:-1], fwd.t]) - r_quarter
    Y = np.concatenate([bwd[:, :-1], fwd.y], axis=1)
    H, S, h, f = Y
    F = (H * H - S - 0.5) / H
    h = h - h[0] + r[0] / 2.0
    f = f - f[0]
    events = [("H=1/4", 0.0)]
    # The linearized tail rounds to H = 1/2 exactly, hence the non-strict bound.
    if np.any(H <= 0) or np.any(H > 0.5) or np.any(F > 0):
        raise LeftAdmissibleRegion("separatrix left the admissible region")
    if mirrored:
        return CuspTrajectory(-r[::-1], -H[::-1], -F[::-1], -h[::-1], -f[::-1], config.delta, events, S[::-1])
    return CuspTrajectory(r, H, F, h, f, config.delta, events, S)


def build_metric(t: CuspTrajectory):
    H, F = t.H, t.F
    dH, dF = cusp_rhs((H, F))
    sec_xy = -(H**2)
    sec_rx = t.S if t.S is not None else -(H**2 + dH)
    sec_rx_alt = -0.5 * (dF + 0.5)
    return CuspMetric(t.r, t.h, t.f, H, F, sec_xy, sec_rx, sec_rx_alt)


def asymptotics_check(m: CuspMetric, decade=10.0, min_left=20.0, min_right=100.0):
    """Deviation from 1 of the tail ratios on each end of the metric.

    Left tail (``r -> -inf``): ``h / (r/2)``.  Right tail: the last decade of
    ``r`` values, ``H r``, ``h / ln r`` and ``f / (-r^2/4)``, plus the limits
    ``H F -> -1/2`` and ``F' -> -1/2``.
    """
    r = m.r
    if r[0] > -min_left or r[-1] < min_right:
        raise TailTooShort("metric does not span both tails")
    left = r <= r[0] / 2.0
    right = r >= r[-1] / decade
    dF = -2.0 * m.sec_rx - 0.5  # F' from the accurately integrated sec_rx
    return {
        "left_h_over_half_r": float(np.max(np.abs(m.h[left] / (r[left] / 2.0) - 1.0))),
        "right_H_times_r": float(np.max(np.abs(m.H[right] * r[right] - 1.0))),
        "right_h_over_log_r": float(np.max(np.abs(m.h[right] / np.log(r[right]) - 1.0))),
        "right_f_over_quarter_r2": float(np.max(np.abs(m.f[right] / (-(r[right] ** 2) / 4.0) - 1.0))),
        "right_HF_plus_half": float(np.max(np.abs(m.H[right] ** 2 - m.sec_rx[right]))),
        "right_dF_plus_half": float(np.max(np.abs(dF[right] + 0.5))),
        "r_range": [float(r[0]), float(r[-1])],
    }
