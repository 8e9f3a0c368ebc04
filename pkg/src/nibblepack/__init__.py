"""Semi-random triangle-free process and iterated triangle-free packing."""

from .graph import EdgeSet, GraphState
from .kernels import BACKEND
from .params import ParamSchedule, build_schedule, choose_constants, psi, stabilization_prob
from .run import run
from .step import StepSample, advance

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EdgeSet",
    "GraphState",
    "ParamSchedule",
    "StepSample",
    "advance",
    "build_schedule",
    "choose_constants",
    "psi",
    "run",
    "stabilization_prob",
]
