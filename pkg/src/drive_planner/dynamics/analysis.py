"""Step-response comparison of actuation models and rise-time measurement."""

from typing import Dict, Literal, Optional

import numpy as np

from drive_planner.dynamics.actuation import (
    ActuationModel,
    DeepResponseActuation,
    LowPassActuation,
    PlantActuation,
    actuate,
)
from drive_planner.dynamics.models import ACC_LIMIT, STEER_LIMIT, TICK, VehicleState
from drive_planner.dynamics.plant import DEFAULT_AMPLITUDE_FRACTION, PlantConfig
from drive_planner.dynamics.response_net import ResponseNet
from drive_planner.utils.errors import ValidationError

Channel = Literal["acc", "steer"]


def simulate_step_response(
    model: ActuationModel,
    commands: np.ndarray,
    speed: float = 5.0,
) -> np.ndarray:
    """
    Drive an actuation model with an (n, 2) command sequence.

    Returns the (n, 2) realized values; row k is the output measured at tick k,
    before command k acts, so the first row is always the initial rest state.
    The speed input is held constant.
    """
    commands = np.asarray(commands, dtype=np.float64)
    state = VehicleState(x=0.0, y=0.0, heading=0.0, speed=speed)
    model.reset(state)
    out = np.zeros_like(commands)
    for k, (cmd_acc, cmd_steer) in enumerate(commands):
        out[k] = (state.actual_acc, state.actual_steer)
        acc, steer = actuate(model, state, float(cmd_acc), float(cmd_steer))
        state = state.with_actuation(acc, steer).with_commands(cmd_acc, cmd_steer)
    return out


def rise_time(t: np.ndarray, y: np.ndarray, final: Optional[float] = None) -> float:
    """
    10%-90% rise time of a monotone step response, linearly interpolated.

    ``final`` defaults to the last sample. Returns NaN when the response never
    reaches 90%.
    """
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    final = float(y[-1]) if final is None else final
    if final == 0.0:
        raise ValidationError("step response has zero final value")
    normalized = y / final

    def crossing(level: float) -> float:
        above = np.nonzero(normalized >= level)[0]
        if len(above) == 0:
            return float("nan")
        i = int(above[0])
        if i == 0:
            return float(t[0])
        y0, y1 = normalized[i - 1], normalized[i]
        return float(t[i - 1] + (level - y0) / (y1 - y0) * (t[i] - t[i - 1]))

    return crossing(0.9) - crossing(0.1)


def step_response_table(
    channel: Channel = "steer",
    step_time: float = 1.0,
    duration: float = 6.0,
    amplitude: Optional[float] = None,
    alpha: float = 0.3,
    response_net: Optional[ResponseNet] = None,
    plant_config: Optional[PlantConfig] = None,
    speed: float = 5.0,
) -> Dict[str, np.ndarray]:
    """
    Step-response comparison: target, low-pass, deep_response (when a net is
    given) and the reference plant, sampled every tick.

    The default amplitude is the default excitation amplitude of the command
    schedule, so the step stays inside the range the net was fitted on.
    """
    n = int(round(duration / TICK)) + 1
    t = np.round(np.arange(n) * TICK, 10)
    column = 0 if channel == "acc" else 1
    limit = ACC_LIMIT if channel == "acc" else STEER_LIMIT
    if amplitude is None:
        amplitude = DEFAULT_AMPLITUDE_FRACTION * limit

    commands = np.zeros((n, 2))
    commands[t >= step_time - 1e-9, column] = amplitude

    table: Dict[str, np.ndarray] = {"t": t, "target": commands[:, column].copy()}
    table["low_pass"] = simulate_step_response(
        LowPassActuation(alpha), commands, speed
    )[:, column]
    if response_net is not None:
        table["deep_response"] = simulate_step_response(
            DeepResponseActuation(response_net), commands, speed
        )[:, column]
    table["plant"] = simulate_step_response(
        PlantActuation(plant_config), commands, speed
    )[:, column]
    return table
