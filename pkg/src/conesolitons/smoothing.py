"""Radial Ricci flow in conformal form and the smoothening-flow experiment.

A radial conformal factor evolves by ``u_t = e^{-2u} (u_rr + u_r / r)``.
On ``s = ln r`` with ``W = e^{2u + 2s}`` (the squared polar radius ``h^2``)
this is the fast-diffusion equation ``W_t = (ln W)_ss``, which we solve on a
uniform ``s`` grid with backward Euler.  The unknown is ``y = ln W``; each
step is a Newton solve with a tridiagonal Jacobian ``diag(e^y) - dt D2``.
That matrix is an M-matrix, so the discrete flow keeps the comparison
principle (ordered initial data stay ordered).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import BetaOutOfRange, StabilityViolation
from .geometry import ConformalProfile


@dataclass
class SmoothFlowState:
    grid: np.ndarray  # r values, log-spaced, ending at the outer boundary
    u: np.ndarray
    time: float
    k_level: Optional[float] = None

    @property
    def sup(self):
        return float(np.max(self.u))


@dataclass(frozen=True)
class ConformalFlowConfig:
    dt0: float = 1e-10
    rel_step: float = 0.02  # dt <= rel_step * t once t > dt0
    newton_tol: float = 1e-10  # roundoff floor of y is ~1e-12 where W is tiny
    newton_maxiter: int = 100


@dataclass
class ConformalRun:
    history: List[SmoothFlowState] = field(default_factory=list)
    steps: int = 0
    newton_iters: int = 0

    def at(self, t):
        for s in self.history:
            if math.isclose(s.time, t, rel_tol=1e-12, abs_tol=0.0):
                return s
        raise KeyError(t)


# ---------------------------------------------------------------------------
# Truncation
# ---------------------------------------------------------------------------


def psi(s):
    """Smoothed minimum profile: ``s`` for ``s <= -1``, ``0`` for ``s >= 1``.

    On ``[-1, 1]`` it is the unique polynomial of degree at most five with
    matching value, slope and ``psi'' = 0`` at both ends.  That polynomial has
    degree four, ``-1 + 2x - 2x^3 + x^4`` with ``x = (s+1)/2``, and
    ``psi' = 1 - (3x^2 - 2x^3) >= 0``, ``psi'' = -3x(1-x) <= 0``.
    """
    s = np.asarray(s, dtype=float)
    x = np.clip((s + 1.0) / 2.0, 0.0, 1.0)
    mid = -1.0 + 2.0 * x - 2.0 * x**3 + x**4
    return np.where(s <= -1.0, s, np.where(s >= 1.0, 0.0, mid))


def dpsi(s):
    s = np.asarray(s, dtype=float)
    x = np.clip((s + 1.0) / 2.0, 0.0, 1.0)
    return 1.0 - (3.0 * x**2 - 2.0 * x**3)


def d2psi(s):
    s = np.asarray(s, dtype=float)
    x = np.clip((s + 1.0) / 2.0, 0.0, 1.0)
    return -3.0 * x * (1.0 - x)


def log_grid(r_min=1e-12, r_max=1.0, n=2000):
    return np.exp(np.linspace(math.log(r_min), math.log(r_max), n))


def truncate_cone(c: ConformalProfile, k, grid=None):
    """``u_k = psi(u_0 - k) + k`` on a log-spaced grid."""
    if grid is None:
        grid = log_grid()
    grid = np.asarray(grid, dtype=float)
    u0 = c.u(grid)
    if k is None:
        return SmoothFlowState(grid, u0, 0.0, None)
    return SmoothFlowState(grid, psi(u0 - k) + k, 0.0, float(k))


# ---------------------------------------------------------------------------
# Barrier
# ---------------------------------------------------------------------------


def _check_open_beta(beta):
    if not (-1.0 < beta < 0.0):
        raise BetaOutOfRange(f"beta={beta} must lie in (-1, 0) for the barrier")


def barrier_lambda(t, beta, C):
    """Transition radius ``(-t e^{-2C} / (4 beta (beta+1)))^{1/(2(beta+1))}``."""
    _check_open_beta(beta)
    t = np.asarray(t, dtype=float)
    return (-t * math.exp(-2.0 * C) / (4.0 * beta * (beta + 1.0))) ** (1.0 / (2.0 * (beta + 1.0)))


def barrier_coefficient(beta):
    return beta / (2.0 * (beta + 1.0))


def barrier_peak(t, beta, C):
    """Peak ``S(0, lambda(t))`` of the blunt-cone barrier (hemisphere glued to a hyperbolic cone)."""
    _check_open_beta(beta)
    t = np.asarray(t, dtype=float)
    kappa = math.exp(-2.0 * C) / (-4.0 * beta * (beta + 1.0))
    return (
        math.log(4.0 * (beta + 1.0))
        + C
        + barrier_coefficient(beta) * (np.log(t) + math.log(kappa))
        - np.log1p(-t * kappa)
    )


# ---------------------------------------------------------------------------
# Flow
# ---------------------------------------------------------------------------


def _second_difference_bands(n, ds):
    """Row coefficients of ``D2``: ``(to the right, diagonal, to the left)`` per row.

    Row 0 uses a Neumann ghost node, so its right coefficient doubles.
    """
    inv = 1.0 / ds**2
    right = np.full(n, inv)
    diag = np.full(n, -2.0 * inv)
    left = np.full(n, inv)
    right[0] = 2.0 * inv
    left[0] = 0.0
    right[-1] = 0.0
    return right, diag, left


def run_conformal_flow(
    initial: SmoothFlowState,
    T,
    sample_times: Sequence[float] = (),
    config: ConformalFlowConfig = ConformalFlowConfig(),
    outer: Optional[Callable[[float], float]] = None,
    inner_slope=0.0,
):
    """Backward-Euler flow up to ``T``; returns slices at ``sample_times`` and ``T``.

    The inner node carries ``r u_r = inner_slope`` (0 for a smooth cap) and the
    outer node is Dirichlet: ``outer(t)`` if given, else the initial value.
    """
    r = np.asarray(initial.grid, dtype=float)
    s = np.log(r)
    ds = s[1] - s[0]
    if not np.allclose(np.diff(s), ds, rtol=1e-9, atol=1e-12):
        raise ValueError("conformal flow needs a log-spaced grid")
    n = r.size
    y = 2.0 * np.asarray(initial.u, dtype=float) + 2.0 * s
    if not np.all(np.isfinite(y)):
        raise StabilityViolation("initial conformal factor must be finite")
    u_out0 = float(initial.u[-1])
    flux = 2.0 + 2.0 * inner_slope  # (ln W)_s at the inner node
    right, diag, left = _second_difference_bands(n, ds)
    # Ghost-node flux contribution at node 0: (y_{-1} = y_1 - 2 ds flux).
    ghost = -2.0 * flux / ds

    targets = sorted({float(t) for t in sample_times if 0 < t <= T} | {float(T)})
    run = ConformalRun(history=[SmoothFlowState(r.copy(), initial.u.copy(), 0.0, initial.k_level)])
    t = 0.0
    dt = config.dt0
    ti = 0
    while ti < len(targets):
        target = targets[ti]
        step = min(dt, target - t)
        t_new = t + step
        W_old = np.exp(y)
        y_new = y.copy()
        y_new[-1] = 2.0 * (outer(t_new) if outer is not None else u_out0) + 2.0 * s[-1]
        prev = math.inf
        for it in range(config.newton_maxiter):
            e = np.exp(y_new)
            D2y = np.empty(n)
            D2y[1:-1] = (y_new[2:] - 2 * y_new[1:-1] + y_new[:-2]) / ds**2
            D2y[0] = (2 * y_new[1] - 2 * y_new[0]) / ds**2 + ghost
            F = e - W_old - step * D2y
            F[-1] = 0.0
            ab = np.zeros((3, n))
            ab[0, 1:] = -step * right[:-1]  # J[j-1, j]
            ab[1] = e - step * diag
            ab[2, :-1] = -step * left[1:]  # J[j+1, j]
            ab[1, -1] = 1.0  # Dirichlet row
            ab[2, -2] = 0.0
            dy = solve_banded((1, 1), ab, -F)
            y_new += dy
            run.newton_iters += 1
            size = float(np.max(np.abs(dy)))
            # Converged, or stalled at the roundoff floor of tiny-W nodes.
            if size < config.newton_tol or (it and size < 1e-8 and size > 0.5 * prev):
                break
            prev = size
        else:
            raise StabilityViolation(f"Newton failed to converge at t={t_new:.3e}")
        y = y_new
        t = t_new
        run.steps += 1
        if t >= target * (1 - 1e-14):
            t = target
            run.history.append(SmoothFlowState(r.copy(), 0.5 * y - s, t, initial.k_level))
            ti += 1
        dt = max(config.dt0, config.rel_step * t)
    return run
