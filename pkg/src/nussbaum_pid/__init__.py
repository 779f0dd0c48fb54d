"""Nussbaum-gain adaptive PID tracking control of a two-link manipulator."""

from .approximator import RbfLayout
from .controller import ControllerParams, ControllerState
from .dynamics import JointState, RobotParams
from .simulation import SimConfig, run_scenario

__all__ = [
    "ControllerParams",
    "ControllerState",
    "JointState",
    "RbfLayout",
    "RobotParams",
    "SimConfig",
    "run_scenario",
]
