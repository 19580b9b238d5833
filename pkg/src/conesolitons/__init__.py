"""Numerical laboratory for rotationally symmetric Ricci solitons and flows on cone surfaces."""

from .errors import ConeSolitonError
from .geometry import ConformalProfile, ConicEuler, RadialProfile
from .integrate import Trajectory
from .polar_flow import FlowState
from .smoothing import SmoothFlowState
from .soliton import SolitonFamily, SolitonSpec

__all__ = [
    "ConeSolitonError",
    "ConformalProfile",
    "ConicEuler",
    "FlowState",
    "RadialProfile",
    "SmoothFlowState",
    "SolitonFamily",
    "SolitonSpec",
    "Trajectory",
]

__version__ = "0.1.0"
