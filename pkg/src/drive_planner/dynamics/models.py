"""Vehicle state, limits and geometry."""

from dataclasses import dataclass, replace
from typing import Tuple

from pydantic import BaseModel, Field

# Action ranges shared by the policy, experts and actuators
ACC_LIMIT = 2.0  # m/s^2
STEER_LIMIT = 0.2  # rad (front-wheel angle)
TICK = 0.1  # s, control period


def clamp(value: float, limit: float) -> float:
    """Clamp ``value`` to [-limit, +limit]."""
    return max(-limit, min(limit, value))


def clamp_action(acc: float, steer: float) -> Tuple[float, float]:
    """Clamp an (acceleration, steering) command to the action ranges."""
    return clamp(acc, ACC_LIMIT), clamp(steer, STEER_LIMIT)


class VehicleConfig(BaseModel):
    """Ego vehicle geometry."""

    wheelbase: float = Field(default=2.8, gt=0.0)


@dataclass(frozen=True)
class VehicleState:
    """Ego pose, speed, realized actuation and last commands."""

    x: float
    y: float
    heading: float
    speed: float
    actual_acc: float = 0.0
    actual_steer: float = 0.0
    last_cmd_acc: float = 0.0
    last_cmd_steer: float = 0.0

    def with_actuation(self, actual_acc: float, actual_steer: float) -> "VehicleState":
        return replace(self, actual_acc=actual_acc, actual_steer=actual_steer)

    def with_commands(self, cmd_acc: float, cmd_steer: float) -> "VehicleState":
        return replace(self, last_cmd_acc=cmd_acc, last_cmd_steer=cmd_steer)
