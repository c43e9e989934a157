"""
Synthetic reference plant and command/response logs.

The reference plant stands in for the real vehicle's actuation: per channel a
pure delay, a first-order lag (exact discretization), a per-tick rate limit,
saturation at the action ranges and optional Gaussian measurement noise.
"""

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Deque, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from drive_planner.dynamics.models import ACC_LIMIT, STEER_LIMIT, TICK, clamp
from drive_planner.utils.errors import DatasetError, ValidationError
from drive_planner.utils.logger import get_logger

logger = get_logger(__name__)

LOG_HEADER = "t,cmd_acc,cmd_steer,speed,meas_acc,meas_steer"

SEGMENT_KINDS = ("step", "ramp", "chirp", "hold", "zero")
SEGMENT_WEIGHTS = (0.3, 0.2, 0.2, 0.2, 0.1)
HOLD_SWITCH_P = 0.25
DEFAULT_AMPLITUDE_FRACTION = 0.9


class PlantConfig(BaseModel):
    """Reference plant parameters."""

    tau_acc: float = Field(default=0.3, gt=0.0)
    tau_steer: float = Field(default=0.4, gt=0.0)
    delay_ticks: int = Field(default=2, ge=0)
    rate_limit_acc: Optional[float] = Field(default=0.5, gt=0.0)
    rate_limit_steer: Optional[float] = Field(default=0.05, gt=0.0)
    noise_std_acc: float = Field(default=0.0, ge=0.0)
    noise_std_steer: float = Field(default=0.0, ge=0.0)
    initial_speed: float = Field(default=4.0, ge=0.0)
    speed_cap: float = Field(default=12.0, gt=0.0)


class _LagChannel:
    """Delay + first-order lag + rate limit + saturation for one channel."""

    def __init__(
        self, tau: float, delay: int, rate_limit: Optional[float], limit: float
    ):
        self.gain = 1.0 - math.exp(-TICK / tau)
        self.delay = delay
        self.rate_limit = rate_limit
        self.limit = limit
        self.value = 0.0
        self.queue: Deque[float] = deque([0.0] * delay)

    def reset(self, value: float = 0.0) -> None:
        self.value = value
        self.queue = deque([0.0] * self.delay)

    def advance(self, command: float) -> float:
        self.queue.append(command)
        delayed = self.queue.popleft()
        change = self.gain * (delayed - self.value)
        if self.rate_limit is not None:
            change = clamp(change, self.rate_limit)
        self.value = clamp(self.value + change, self.limit)
        return self.value


class ReferencePlant:
    """Stateful reference plant; one instance per simulated vehicle."""

    def __init__(self, config: Optional[PlantConfig] = None):
        self.config = config or PlantConfig()
        self.acc = _LagChannel(
            self.config.tau_acc,
            self.config.delay_ticks,
            self.config.rate_limit_acc,
            ACC_LIMIT,
        )
        self.steer = _LagChannel(
            self.config.tau_steer,
            self.config.delay_ticks,
            self.config.rate_limit_steer,
            STEER_LIMIT,
        )

    def reset(self, acc: float = 0.0, steer: float = 0.0) -> None:
        self.acc.reset(acc)
        self.steer.reset(steer)

    @property
    def output(self) -> Tuple[float, float]:
        return self.acc.value, self.steer.value

    def advance(self, cmd_acc: float, cmd_steer: float) -> Tuple[float, float]:
        """Apply one tick of commands and return the new realized (acc, steer)."""
        return self.acc.advance(cmd_acc), self.steer.advance(cmd_steer)


@dataclass(frozen=True)
class ResponseLog:
    """Command/response rows at constant 0.1 s spacing."""

    t: np.ndarray
    cmd_acc: np.ndarray
    cmd_steer: np.ndarray
    speed: np.ndarray
    meas_acc: np.ndarray
    meas_steer: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for name in ("cmd_acc", "cmd_steer", "speed", "meas_acc", "meas_steer"):
            if len(getattr(self, name)) != n:
                raise DatasetError(f"column '{name}' length differs from t")
        if n > 1:
            steps = np.diff(self.t)
            if np.any(steps <= 0.0) or np.max(np.abs(steps - TICK)) > 1e-6:
                raise DatasetError(
                    "timestamps must increase with a constant 0.1 s step"
                )
        if np.any(np.abs(self.meas_acc) > ACC_LIMIT + 1e-9) or np.any(
            np.abs(self.meas_steer) > STEER_LIMIT + 1e-9
        ):
            raise DatasetError("measured values outside the action ranges")

    def __len__(self) -> int:
        return len(self.t)

    def as_matrix(self) -> np.ndarray:
        return np.column_stack(
            (
                self.t,
                self.cmd_acc,
                self.cmd_steer,
                self.speed,
                self.meas_acc,
                self.meas_steer,
            )
        )

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(
            path,
            self.as_matrix(),
            delimiter=",",
            header=LOG_HEADER,
            comments="",
            fmt="%.17g",
        )
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "ResponseLog":
        path = Path(path)
        with path.open("r", encoding="utf-8") as handle:
            header = handle.readline().strip()
        if header != LOG_HEADER:
            raise DatasetError(
                f"unexpected response log header in {path}",
                details={"expected": LOG_HEADER, "found": header},
            )
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(*(np.ascontiguousarray(data[:, i]) for i in range(6)))


def make_command_schedule(
    n_rows: int,
    rng: np.random.Generator,
    amplitude_fraction: float = DEFAULT_AMPLITUDE_FRACTION,
) -> np.ndarray:
    """
    Build an (n_rows, 2) excitation schedule of (cmd_acc, cmd_steer).

    Each channel is a sequence of independent segments (10-50 ticks) drawn from
    steps, ramps, chirps, random-level holds and zeros. A random-level hold
    switches to a fresh uniform level with probability ``HOLD_SWITCH_P`` per
    tick, which keeps the lag and delay transients dense in the log.
    """
    if n_rows <= 0:
        raise ValidationError("schedule length must be positive")
    schedule = np.zeros((n_rows, 2))
    for column, limit in enumerate((ACC_LIMIT, STEER_LIMIT)):
        amplitude = amplitude_fraction * limit
        start = 0
        level = 0.0
        while start < n_rows:
            length = int(rng.integers(10, 51))
            stop = min(n_rows, start + length)
            count = stop - start
            kind = rng.choice(SEGMENT_KINDS, p=SEGMENT_WEIGHTS)
            target = float(rng.uniform(-amplitude, amplitude))
            if kind == "step":
                segment = np.full(count, target)
            elif kind == "ramp":
                segment = np.linspace(level, target, count)
            elif kind == "chirp":
                t = np.arange(count) * TICK
                f0, f1 = 0.05, float(rng.uniform(0.3, 1.0))
                duration = max(count * TICK, TICK)
                phase = 2.0 * math.pi * (f0 * t + 0.5 * (f1 - f0) * t**2 / duration)
                segment = abs(target) * np.sin(phase)
            elif kind == "hold":
                switches = rng.random(count) < HOLD_SWITCH_P
                levels = rng.uniform(-amplitude, amplitude, count)
                last = np.maximum.accumulate(np.where(switches, np.arange(count), -1))
                segment = np.where(last >= 0, levels[np.maximum(last, 0)], level)
            else:
                segment = np.zeros(count)
            schedule[start:stop, column] = segment
            level = float(segment[-1])
            start = stop
    return schedule


def generate_response_log(
    plant_config: PlantConfig,
    command_schedule: np.ndarray,
    rng: np.random.Generator,
) -> ResponseLog:
    """
    Record the reference plant's response to a command schedule.

    Row k holds the command issued at t_k and the plant output measured at t_k
    (before that command acts). Positive acceleration commands are mirrored
    once the speed exceeds ``speed_cap``; the log stores the applied command.
    """
    schedule = np.asarray(command_schedule, dtype=np.float64)
    if schedule.ndim != 2 or schedule.shape[0] == 0 or schedule.shape[1] != 2:
        raise ValidationError("command schedule is empty or not (n, 2)")

    plant = ReferencePlant(plant_config)
    n = schedule.shape[0]
    rows = np.zeros((n, 6))
    speed = plant_config.initial_speed

    for k in range(n):
        cmd_acc = clamp(float(schedule[k, 0]), ACC_LIMIT)
        cmd_steer = clamp(float(schedule[k, 1]), STEER_LIMIT)
        if speed > plant_config.speed_cap and cmd_acc > 0.0:
            cmd_acc = -cmd_acc
        acc, steer = plant.output
        meas_acc = acc
        meas_steer = steer
        if plant_config.noise_std_acc > 0.0:
            noise_acc = rng.normal(0.0, plant_config.noise_std_acc)
            meas_acc = clamp(acc + noise_acc, ACC_LIMIT)
        if plant_config.noise_std_steer > 0.0:
            meas_steer = clamp(
                steer + rng.normal(0.0, plant_config.noise_std_steer), STEER_LIMIT
            )
        rows[k] = (round(k * TICK, 10), cmd_acc, cmd_steer, speed, meas_acc, meas_steer)
        new_acc, _ = plant.advance(cmd_acc, cmd_steer)
        speed = max(0.0, speed + new_acc * TICK)

    logger.debug(f"Generated response log with {n} rows")
    return ResponseLog(*(np.ascontiguousarray(rows[:, i]) for i in range(6)))
