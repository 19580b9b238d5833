"""Angle-preserving Ricci flow of radial cone metrics in geodesic polar form.

With ``g = drho^2 + h^2 dtheta^2`` evolving by ``dg/dtau = -2 K g`` and polar
coordinates re-centred on the tip at every time, the profile obeys

    h_tau = h_rhorho + h_rho * int_0^rho K,       K = -h_rhorho / h.

For a closed profile the second tip ``rho = L`` moves with
``L' = -int_0^L K``.  The state is stored on ``x = rho / L``; in that frame
``dh/dtau|_x = h_tau + x L' h_rho`` and both tips stay at ``h = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import GridTooCoarse, NotClosed, ProfileCollapsed, StabilityViolation
from .geometry import RadialProfile, fd_weights, tip_slope

TWO_PI = 2.0 * math.pi
SINGULARITY = "SingularityDetected"


@dataclass
class FlowState:
    grid: np.ndarray
    h: np.ndarray
    time: float
    alpha: float
    alphaA: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def closed(self):
        return self.alphaA is not None

    @property
    def length(self):
        return float(self.grid[-1] - self.grid[0])

    @property
    def chi_hat(self):
        """Conic Euler characteristic of the sphere (two tips) from the tip angles."""
        if not self.closed:
            return None
        return (self.alpha + self.alphaA) / TWO_PI

    def profile(self):
        return RadialProfile(self.grid, self.h, angle0=self.alpha, angleA=self.alphaA)


@dataclass(frozen=True)
class FlowConfig:
    cfl: float = 0.25
    k_ceiling: float = 1e4
    area_floor: float = 1e-4  # fraction of the initial area
    snapshot_every: int = 0  # 0: only the first and last slices
    outer: str = "fixed"  # open profiles: "fixed" keeps h(rho_max); "free" evolves it one-sidedly
    normalized: bool = False


@dataclass
class FlowRun:
    history: List[FlowState]
    series: dict
    status: str
    steps: int

    @property
    def final(self):
        return self.history[-1]


def state_from_profile(p: RadialProfile, time=0.0):
    if not p.left_tip:
        raise ValueError("flow needs a tip at the left end")
    grid = np.asarray(p.grid, dtype=float)
    if p.closed_form is None and p.angle0 is None:
        alpha = TWO_PI * tip_slope(grid, p.values, "left")
    else:
        alpha = p.angle0 if p.angle0 is not None else TWO_PI * float(p.closed_form.dh(grid[0]))
    alphaA = None
    if p.right_tip:
        alphaA = p.angleA if p.angleA is not None else TWO_PI * tip_slope(grid, p.values, "right")
    h = p.values.copy()
    h[0] = 0.0
    if alphaA is not None:
        h[-1] = 0.0
    return FlowState(grid - grid[0], h, float(time), float(alpha), alphaA)


# ---------------------------------------------------------------------------
# Spatial operator
# ---------------------------------------------------------------------------


# Tip slope from the odd fit s t + c t^3 + e t^5 through t = d, 2d, 3d.
_TIP_W = np.linalg.inv(np.array([[t, t**3, t**5] for t in (1.0, 2.0, 3.0)]))[0]


def _tip_slopes(h, d):
    left = float(_TIP_W @ h[1:4]) / d
    right = -float(_TIP_W @ h[-2:-5:-1]) / d
    return left, right


def _operators(rho, h, closed):
    n = rho.size
    if n < 5:
        raise GridTooCoarse("flow grid needs at least 5 nodes")
    d = rho[1] - rho[0]
    if np.any(h[1:-1] <= 0.0) or (not closed and h[-1] <= 0.0):
        raise ProfileCollapsed("profile is no longer positive in the interior")
    hp = np.empty(n)
    hpp = np.empty(n)
    hp[1:-1] = (h[2:] - h[:-2]) / (2 * d)
    hpp[1:-1] = (h[2:] - 2 * h[1:-1] + h[:-2]) / d**2
    hp[0], right = _tip_slopes(h, d)
    hpp[0] = 0.0
    if closed:
        hp[-1] = right
        hpp[-1] = 0.0
    else:
        hp[-1] = fd_weights(rho[-1], rho[-3:], 1) @ h[-3:]
        hpp[-1] = fd_weights(rho[-1], rho[-4:], 2) @ h[-4:]
    K = np.empty(n)
    K[1:-1] = -hpp[1:-1] / h[1:-1]
    K[0] = (4 * K[1] - K[2]) / 3.0
    if closed:
        K[-1] = (4 * K[-2] - K[-3]) / 3.0
    else:
        K[-1] = -hpp[-1] / h[-1]
    return hp, hpp, K


def average_curvature(state: FlowState, K=None):
    """Average scalar curvature ``r = int R dmu / Area`` (0 for open profiles)."""
    if not state.closed:
        return 0.0
    if K is None:
        K = _operators(state.grid, state.h, True)[2]
    return 2.0 * float(np.trapezoid(K * state.h, state.grid) / np.trapezoid(state.h, state.grid))


def _rhs_parts(state: FlowState, normalized=False):
    rho, h = state.grid, state.h
    closed = state.closed
    hp, hpp, K = _operators(rho, h, closed)
    d = rho[1] - rho[0]
    I = np.empty_like(K)
    I[0] = 0.0
    np.cumsum(0.5 * d * (K[1:] + K[:-1]), out=I[1:])
    rhs = hpp + hp * I
    Lp = -I[-1] if closed else 0.0
    if normalized and closed:
        r = 2.0 * float(np.trapezoid(K * h, rho) / np.trapezoid(h, rho))
        rhs = rhs + 0.5 * r * (h - rho * hp)
        Lp = Lp + 0.5 * r * rho[-1]
    rhs[0] = 0.0
    return rhs, Lp, hp, K


def polar_flow_rhs(state, normalized=False):
    """``dh/dtau`` at fixed ``rho``; zero at the left tip.

    ``normalized`` adds the area-preserving term ``(r/2)(h - rho h')``.
    """
    if isinstance(state, RadialProfile):
        state = state_from_profile(state)
    return _rhs_parts(state, normalized)[0]


def frame_rhs(state: FlowState, normalized=False):
    """``dh/dtau`` on the scaled grid ``x = rho/L`` and the tip speed ``L'``."""
    rhs, Lp, hp, _ = _rhs_parts(state, normalized)
    if state.closed:
        x = state.grid / state.grid[-1]
        rhs = rhs + hp * x * Lp
        rhs[-1] = 0.0
    rhs[0] = 0.0
    return rhs, Lp


# ---------------------------------------------------------------------------
# Time stepping
# ---------------------------------------------------------------------------


def diagnostics(state: FlowState, K=None):
    if K is None:
        K = _operators(state.grid, state.h, state.closed)[2]
    h = state.h
    d = state.grid[1] - state.grid[0]
    int_h = d * (h.sum() - 0.5 * (h[0] + h[-1]))
    left, right = _tip_slopes(h, d)
    out = {
        "area": TWO_PI * float(int_h),
        "avg_curvature": 0.0,
        "max_abs_K": float(np.max(np.abs(K))),
        "tip_slope": left,
        "length": state.length,
    }
    if state.closed:
        kh = K * h
        out["avg_curvature"] = 2.0 * float(d * (kh.sum() - 0.5 * (kh[0] + kh[-1])) / int_h)
        out["tip_slope_A"] = right
    return out


def run_polar_flow(initial, T, config: FlowConfig = FlowConfig(), monitor: Optional[Callable] = None):
    """Explicit Euler integration up to ``T`` with ``dtau = cfl * drho^2``.

    Stops early with status ``SingularityDetected`` when ``max|K|`` exceeds the
    ceiling or the area falls below the floor.  ``monitor(state)`` is called
    after every accepted step.
    """
    if config.cfl > 0.5:
        raise StabilityViolation(f"cfl={config.cfl} exceeds the explicit limit 1/2")
    state = initial if isinstance(initial, FlowState) else state_from_profile(initial)
    state = replace(state, h=state.h.copy(), grid=state.grid.copy(), diagnostics=diagnostics(state))
    n = state.grid.size
    x = state.grid / state.grid[-1]
    L = state.length
    area0 = state.diagnostics["area"]

    series = {k: [] for k in state.diagnostics}
    series["time"] = []
    history = [state]
    h = state.h.copy()
    tau = state.time
    status = "complete"
    steps = 0
    fixed_outer = (not state.closed) and config.outer == "fixed"
    cur = state
    while True:
        # Spatial operator of the current slice; its K also feeds the diagnostics.
        try:
            rhs, Lp, hp, K = _rhs_parts(cur, config.normalized)
        except ProfileCollapsed:
            status = SINGULARITY
            break
        diag = diagnostics(cur, K)
        cur.diagnostics = diag
        for k, v in diag.items():
            series[k].append(v)
        series["time"].append(tau)
        if steps and monitor is not None:
            monitor(cur)
        if steps and config.snapshot_every and steps % config.snapshot_every == 0:
            history.append(cur)
        if diag["max_abs_K"] > config.k_ceiling or diag["area"] < config.area_floor * area0:
            status = SINGULARITY
            break
        if tau >= T - 1e-15:
            break
        if state.closed:
            rhs = rhs + hp * x * Lp
            rhs[-1] = 0.0
        elif fixed_outer:
            rhs[-1] = 0.0
        d = L / (n - 1)
        dt = min(config.cfl * d * d, T - tau)
        h = h + dt * rhs
        if not np.all(np.isfinite(h)):
            raise StabilityViolation("non-finite profile values")
        if state.closed:
            L = L + dt * Lp
            if L <= 0:
                raise ProfileCollapsed("tip distance collapsed to zero")
        tau += dt
        steps += 1
        cur = FlowState(x * L, h, tau, state.alpha, state.alphaA)
    if history[-1] is not cur:
        history.append(cur)
    return FlowRun(history, {k: np.asarray(v) for k, v in series.items()}, status, steps)


def angle_drift(history):
    """``max |tip slope - alpha / 2 pi|`` over a history (both tips when closed)."""
    drift = 0.0
    for s in history:
        d = s.diagnostics or diagnostics(s)
        drift = max(drift, abs(d["tip_slope"] - s.alpha / TWO_PI))
        if s.closed:
            drift = max(drift, abs(d["tip_slope_A"] + s.alphaA / TWO_PI))
    return drift


def series_drift(run: FlowRun, alpha, alphaA=None):
    drift = float(np.max(np.abs(run.series["tip_slope"] - alpha / TWO_PI)))
    if alphaA is not None:
        drift = max(drift, float(np.max(np.abs(run.series["tip_slope_A"] + alphaA / TWO_PI))))
    return drift


# ---------------------------------------------------------------------------
# Soliton defect
# ---------------------------------------------------------------------------


def soliton_defect(state: FlowState, chi_hat=None, outer_flux=None, derivatives=None):
    """Potential ``f`` with ``Laplacian f = R - r`` and ``max |M|^2``.

    ``M`` is the traceless Hessian of ``f``; with ``lambda = (f'' - (h'/h) f')/2``,
    ``|M|^2 = 2 lambda^2``.  ``r`` is the discrete average of ``R``, so the flux
    ``int (R - r) h`` vanishes at the far tip; ``chi_hat`` is only used as a
    consistency value.  Open profiles need ``outer_flux`` (a value of
    ``int_0^rho_max (R - r) h``) and use ``r = 0``.  ``derivatives`` may give
    exact ``(h', h'')`` on the grid.
    """
    rho, h = state.grid, state.h
    if not state.closed and outer_flux is None:
        raise NotClosed("open profile needs an outer boundary condition")
    if derivatives is None:
        hp, hpp, K = _operators(rho, h, state.closed)
    else:
        hp, hpp = derivatives
        K = np.empty_like(h)
        K[1:-1] = -hpp[1:-1] / h[1:-1]
        K[0] = (4 * K[1] - K[2]) / 3.0
        K[-1] = (4 * K[-2] - K[-3]) / 3.0 if state.closed else -hpp[-1] / h[-1]
    R = 2.0 * K
    if state.closed:
        r = float(np.trapezoid(R * h, rho) / np.trapezoid(h, rho))
    else:
        r = 0.0
    G = cumulative_trapezoid((R - r) * h, rho, initial=0.0)
    if not state.closed:
        G = G + (outer_flux - G[-1]) * (rho / rho[-1])  # match the supplied outer flux
    lam = np.zeros_like(h)
    inner = slice(1, h.size - 1)
    lam[inner] = 0.5 * ((R[inner] - r) - 2.0 * G[inner] * hp[inner] / h[inner] ** 2)
    fp = np.zeros_like(h)
    fp[inner] = G[inner] / h[inner]
    f = cumulative_trapezoid(fp, rho, initial=0.0)
    M2 = 2.0 * lam**2
    return f, float(np.max(M2)), r


def collapse_time(state: FlowState):
    """Time left before the area vanishes, ``Area / (4 pi chi_hat)``."""
    chi = state.chi_hat
    if chi is None or chi <= 0:
        raise NotClosed("collapse time needs a closed profile with positive chi_hat")
    area = state.diagnostics.get("area") if state.diagnostics else None
    if area is None:
        area = TWO_PI * float(np.trapezoid(state.h, state.grid))
    return area / (4.0 * math.pi * chi)
