"""Adaptive integration of planar ODE systems with tagged events."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StepUnderflow

TIP = "TipCrossing"
ISOCLINE = "IsoclineTouch"
BLOWUP = "BlowUp"
ASYMPTOTE = "AsymptoteReached"


@dataclass(frozen=True)
class Event:
    kind: str
    r: float
    h: float
    u: float


@dataclass
class Trajectory:
    """Sampled solution ``(h, u)(r)`` with events and optional dense output."""

    params: np.ndarray
    states: np.ndarray
    events: List[Event] = field(default_factory=list)
    spec: Any = None
    potential: Optional[np.ndarray] = None
    dense: Optional[Callable] = None
    status: str = "complete"

    @property
    def h(self):
        return self.states[:, 0]

    @property
    def u(self):
        return self.states[:, 1]

    def tips(self):
        return [e for e in self.events if e.kind == TIP]

    def has(self, kind):
        return any(e.kind == kind for e in self.events)

    def sample(self, r):
        """Dense-output evaluation of ``(h, u)`` at ``r`` (array of shape (n, 2))."""
        if self.dense is None:
            raise ValueError("trajectory has no dense output")
        return np.asarray(self.dense(np.asarray(r, dtype=float))).T[..., :2]


def _event(fn, terminal=False, direction=0):
    fn.terminal = terminal
    fn.direction = direction
    return fn


def integrate_system(
    fun,
    y0,
    r_span,
    tol=1e-10,
    max_u=1e6,
    tip_stop=None,
    asymptote=None,
    isocline_u=None,
    method="DOP853",
    spec=None,
    max_step=np.inf,
):
    """Integrate ``y' = fun(r, y)`` where ``y[0] = h`` and ``y[1] = u``.

    ``tip_stop`` stops after that many ``h = 0`` crossings.  ``asymptote`` is
    ``(u_inf, tol)`` and stops when ``|u - u_inf| < tol``.  A ``|u| > max_u``
    ends the run with a BlowUp event.  Extra components of ``y`` are carried
    along (e.g. the potential).
    """
    r0 = float(r_span[0])
    events = []
    kinds = []

    y_start = np.asarray(y0, dtype=float)
    sgn = np.sign(r_span[1] - r_span[0])
    start_sign = float(np.sign(y_start[0]) or sgn * np.sign(y_start[1]) or 1.0)

    def tip(r, y):
        # At r0 on h = 0 report the sign h takes just after the start, so the
        # starting point is not counted as a crossing.
        if r == r0 and y[0] == 0.0:
            return start_sign
        return y[0]

    events.append(_event(tip, terminal=tip_stop if tip_stop else False))
    kinds.append(TIP)

    def blow(r, y):
        return max_u - abs(y[1])

    events.append(_event(blow, terminal=True))
    kinds.append(BLOWUP)

    if asymptote is not None:
        u_inf, a_tol = asymptote

        def asym(r, y):
            return abs(y[1] - u_inf) - a_tol

        events.append(_event(asym, terminal=True, direction=-1))
        kinds.append(ASYMPTOTE)
    if isocline_u is not None:

        def iso(r, y):
            return y[1] - isocline_u

        events.append(_event(iso))
        kinds.append(ISOCLINE)

    sol = solve_ivp(
        fun,
        r_span,
        np.asarray(y0, dtype=float),
        method=method,
        rtol=tol,
        atol=tol,
        dense_output=True,
        events=events,
        max_step=max_step,
    )
    if sol.status == -1:
        raise StepUnderflow(sol.message)

    found = []
    for kind, te, ye in zip(kinds, sol.t_events, sol.y_events):
        for r, y in zip(te, ye):
            # Starting exactly on h = 0 makes the solver report a spurious root at r0.
            if kind == TIP and abs(r - r0) <= 1e-12 * max(1.0, abs(r0)):
                continue
            found.append(Event(kind, float(r), float(y[0]), float(y[1])))
    direction = np.sign(r_span[1] - r_span[0])
    found.sort(key=lambda e: direction * e.r)

    status = "complete"
    if any(e.kind == BLOWUP for e in found):
        status = BLOWUP
    elif any(e.kind == ASYMPTOTE for e in found):
        status = ASYMPTOTE
    elif tip_stop and sum(e.kind == TIP for e in found) >= tip_stop:
        status = TIP

    y = sol.y.T
    return Trajectory(
        params=sol.t,
        states=y[:, :2].copy(),
        events=found,
        spec=spec,
        potential=y[:, 2].copy() if y.shape[1] > 2 else None,
        dense=sol.sol,
        status=status,
    )
