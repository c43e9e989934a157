"""Two-head Gaussian actor-critic with hand-written forward and backward passes."""

from drive_planner.policy.architecture import (
    NetArchitecture,
    build_architecture,
    default_architecture,
    tiny_architecture,
)
from drive_planner.policy.checkpoint import load_checkpoint, save_checkpoint
from drive_planner.policy.network import (
    Action,
    LossCoeffs,
    NetOutput,
    backward_il,
    backward_rl,
    forward,
    sample_action,
)
from drive_planner.policy.optim import build_optimizer
from drive_planner.policy.params import Gradients, NetParams, init_params

__all__ = [
    "Action",
    "Gradients",
    "LossCoeffs",
    "NetArchitecture",
    "NetOutput",
    "NetParams",
    "backward_il",
    "backward_rl",
    "build_architecture",
    "build_optimizer",
    "default_architecture",
    "forward",
    "init_params",
    "load_checkpoint",
    "sample_action",
    "save_checkpoint",
    "tiny_architecture",
]
