"""Vehicle dynamics: kinematic bicycle, actuation models and deep_response."""

from drive_planner.dynamics.actuation import (
    ActuationModel,
    ActuationSpec,
    actuate,
    actuation_factory,
    build_actuation,
)
from drive_planner.dynamics.bicycle import step_bicycle, turning_radius
from drive_planner.dynamics.models import (
    ACC_LIMIT,
    STEER_LIMIT,
    TICK,
    VehicleConfig,
    VehicleState,
)
from drive_planner.dynamics.plant import (
    PlantConfig,
    ReferencePlant,
    ResponseLog,
    generate_response_log,
)
from drive_planner.dynamics.response_net import ResponseNet, train_deep_response

__all__ = [
    "ACC_LIMIT",
    "STEER_LIMIT",
    "TICK",
    "ActuationModel",
    "ActuationSpec",
    "PlantConfig",
    "ReferencePlant",
    "ResponseLog",
    "ResponseNet",
    "VehicleConfig",
    "VehicleState",
    "actuate",
    "actuation_factory",
    "build_actuation",
    "generate_response_log",
    "step_bicycle",
    "train_deep_response",
    "turning_radius",
]
