"""Kinematic bicycle model."""

import math

from drive_planner.dynamics.models import (
    ACC_LIMIT,
    STEER_LIMIT,
    VehicleState,
    clamp,
)
from drive_planner.utils.geometry import wrap_angle


def step_bicycle(state: VehicleState, dt: float, wheelbase: float) -> VehicleState:
    """
    Advance the vehicle by ``dt`` using its realized acceleration and steering.

    The yaw step uses the speed at the start of the step. The displacement uses
    the average of old and new speed and follows the average heading.
    Speed is clamped at zero (no reverse gear).

    Args:
        state: Current state; ``actual_acc`` and ``actual_steer`` are applied
        dt: Step length in seconds (> 0)
        wheelbase: Axle distance in meters

    Returns:
        The new state with wrapped heading
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")

    acc = clamp(state.actual_acc, ACC_LIMIT)
    steer = clamp(state.actual_steer, STEER_LIMIT)

    new_speed = max(0.0, state.speed + acc * dt)
    mean_speed = 0.5 * (state.speed + new_speed)

    if steer == 0.0:
        new_heading = state.heading
        mean_heading = state.heading
    else:
        yaw_step = (state.speed / wheelbase) * math.tan(steer) * dt
        new_heading = state.heading + yaw_step
        mean_heading = state.heading + 0.5 * yaw_step

    distance = mean_speed * dt
    return VehicleState(
        x=state.x + distance * math.cos(mean_heading),
        y=state.y + distance * math.sin(mean_heading),
        heading=wrap_angle(new_heading),
        speed=new_speed,
        actual_acc=acc,
        actual_steer=steer,
        last_cmd_acc=state.last_cmd_acc,
        last_cmd_steer=state.last_cmd_steer,
    )


def turning_radius(steer: float, wheelbase: float) -> float:
    """Steady-state turning radius for a front-wheel angle (inf when straight)."""
    if steer == 0.0:
        return math.inf
    return wheelbase / math.tan(abs(steer))
