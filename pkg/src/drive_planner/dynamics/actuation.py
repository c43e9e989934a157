"""
Actuation models: how commanded actions become realized actions.

Each model instance carries per-vehicle state (filter memory, command history,
plant delay line) and must be reset at the start of every episode.
"""

from collections import deque
from pathlib import Path
from typing import Callable, Deque, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from drive_planner.dynamics.models import VehicleState, clamp_action
from drive_planner.dynamics.plant import PlantConfig, ReferencePlant
from drive_planner.dynamics.response_net import ResponseNet
from drive_planner.utils.errors import ValidationError, not_found_error
from drive_planner.utils.logger import get_logger

logger = get_logger(__name__)

ActuationKind = Literal["instant", "low_pass", "deep_response", "plant"]


class ActuationSpec(BaseModel):
    """Actuation selection as it appears in run configs."""

    kind: ActuationKind = "low_pass"
    alpha: float = Field(default=0.3, gt=0.0, le=1.0)
    response_checkpoint: Optional[str] = None
    plant: PlantConfig = Field(default_factory=PlantConfig)

    @model_validator(mode="after")
    def _check_checkpoint(self) -> "ActuationSpec":
        if self.kind == "deep_response" and not self.response_checkpoint:
            raise ValueError("deep_response actuation needs response_checkpoint")
        return self


class ActuationModel:
    """Base class; subclasses implement :meth:`apply`."""

    kind: str = "instant"

    def reset(self, state: VehicleState) -> None:
        """Forget history; called at every episode start."""

    def apply(
        self, state: VehicleState, cmd_acc: float, cmd_steer: float
    ) -> Tuple[float, float]:
        raise NotImplementedError

    def describe(self) -> str:
        return self.kind


class InstantActuation(ActuationModel):
    """Realized action equals the command."""

    kind = "instant"

    def apply(self, state, cmd_acc, cmd_steer):
        return cmd_acc, cmd_steer


class LowPassActuation(ActuationModel):
    """First-order discrete filter: prev + alpha * (cmd - prev) per channel."""

    kind = "low_pass"

    def __init__(self, alpha: float):
        if not 0.0 < alpha <= 1.0:
            raise ValidationError(
                f"low-pass alpha must be in (0, 1], got {alpha}",
                details={"alpha": alpha},
            )
        self.alpha = alpha

    def apply(self, state, cmd_acc, cmd_steer):
        acc = state.actual_acc + self.alpha * (cmd_acc - state.actual_acc)
        steer = state.actual_steer + self.alpha * (cmd_steer - state.actual_steer)
        return acc, steer

    def describe(self) -> str:
        return f"low_pass(alpha={self.alpha})"


class DeepResponseActuation(ActuationModel):
    """Learned surrogate of the vehicle's actuation dynamics."""

    kind = "deep_response"

    def __init__(self, net: ResponseNet):
        self.net = net
        self.history: Deque[Tuple[float, float]] = deque(
            maxlen=max(1, net.command_history)
        )

    def reset(self, state: VehicleState) -> None:
        self.history.clear()

    def apply(self, state, cmd_acc, cmd_steer):
        # most recent previous command first
        past = list(reversed(self.history))
        acc, steer = self.net.step(
            cmd_acc,
            cmd_steer,
            state.speed,
            state.actual_acc,
            state.actual_steer,
            history=past,
        )
        if self.net.command_history > 0:
            self.history.append((cmd_acc, cmd_steer))
        return acc, steer

    def describe(self) -> str:
        return f"deep_response(history={self.net.command_history})"


class PlantActuation(ActuationModel):
    """The synthetic reference plant itself, used as the 'real car' in evaluation."""

    kind = "plant"

    def __init__(self, config: Optional[PlantConfig] = None):
        self.plant = ReferencePlant(config)

    def reset(self, state: VehicleState) -> None:
        self.plant.reset(state.actual_acc, state.actual_steer)

    def apply(self, state, cmd_acc, cmd_steer):
        return self.plant.advance(cmd_acc, cmd_steer)


def actuate(
    model: ActuationModel, state: VehicleState, cmd_acc: float, cmd_steer: float
) -> Tuple[float, float]:
    """Realized (acc, steer) for this tick, clamped to the action ranges."""
    cmd_acc, cmd_steer = clamp_action(cmd_acc, cmd_steer)
    acc, steer = model.apply(state, cmd_acc, cmd_steer)
    return clamp_action(acc, steer)


def build_actuation(spec: ActuationSpec) -> ActuationModel:
    """Instantiate a fresh actuation model (one per simulated vehicle)."""
    if spec.kind == "instant":
        return InstantActuation()
    if spec.kind == "low_pass":
        return LowPassActuation(spec.alpha)
    if spec.kind == "plant":
        return PlantActuation(spec.plant)

    path = Path(spec.response_checkpoint or "")
    if not path.exists():
        raise not_found_error("response checkpoint", str(path))
    logger.debug(f"Loading deep_response model from {path}")
    return DeepResponseActuation(ResponseNet.load(path))


def actuation_factory(spec: ActuationSpec) -> Callable[[], ActuationModel]:
    """Factory of fresh models; a deep_response checkpoint is read once."""
    if spec.kind != "deep_response":
        return lambda: build_actuation(spec)
    path = Path(spec.response_checkpoint or "")
    if not path.exists():
        raise not_found_error("response checkpoint", str(path))
    net = ResponseNet.load(path)
    return lambda: DeepResponseActuation(net)
