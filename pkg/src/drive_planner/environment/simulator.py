"""
Gymnasium environment for one scenario.

Per tick (0.1 s): clamp the command, actuate, step the bicycle, localize,
check terminals, render and compute both rewards on the commanded actions.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import gymnasium as gym
import numpy as np
from gymnasium import spaces
from pydantic import BaseModel, Field

from drive_planner.dynamics.actuation import (
    ActuationModel,
    ActuationSpec,
    InstantActuation,
    actuate,
    actuation_factory,
)
from drive_planner.dynamics.bicycle import step_bicycle
from drive_planner.dynamics.models import (
    ACC_LIMIT,
    STEER_LIMIT,
    TICK,
    VehicleConfig,
    VehicleState,
    clamp_action,
)
from drive_planner.environment.localization import check_terminal, localize
from drive_planner.environment.models import (
    CHANNELS,
    N_SCALARS,
    LocalizationResult,
    Observation,
    Path,
    PathConfig,
    RenderConfig,
    Scenario,
    TerminalConfig,
    TerminalState,
)
from drive_planner.environment.raster import render_observation
from drive_planner.environment.scenario import sample_path
from drive_planner.rewards import (
    RewardPair,
    RewardWeights,
    TransitionContext,
    compute_rewards,
)
from drive_planner.utils.errors import ValidationError


@dataclass(frozen=True)
class StepResult:
    """Everything the trainer and experts need from one tick."""

    observation: Observation
    rewards: RewardPair
    terminal: TerminalState
    loc: LocalizationResult
    state: VehicleState
    elapsed: float

    @property
    def done(self) -> bool:
        return self.terminal.is_terminal


class DrivingSimulator(gym.Env):
    """
    Single-vehicle driving environment over one scenario.

    ``reset`` samples a path, puts the vehicle on its first waypoint aligned
    with the path and draws the initial speed uniformly from
    ``initial_speed_range``. Observations are :class:`Observation` objects;
    ``observation_space`` documents their shapes.
    """

    metadata = {"render_modes": []}

    def __init__(
        self,
        scenario: Scenario,
        actuation: Optional[ActuationModel] = None,
        weights: Optional[RewardWeights] = None,
        render_config: Optional[RenderConfig] = None,
        terminal_config: Optional[TerminalConfig] = None,
        path_config: Optional[PathConfig] = None,
        vehicle: Optional[VehicleConfig] = None,
        initial_speed_range: Tuple[float, float] = (0.0, 8.0),
    ):
        super().__init__()
        self.scenario = scenario
        self.actuation = actuation or InstantActuation()
        self.weights = weights or RewardWeights()
        self.render_config = render_config or RenderConfig()
        self.terminal_config = terminal_config or TerminalConfig()
        self.path_config = path_config or PathConfig()
        self.vehicle = vehicle or VehicleConfig()
        low, high = initial_speed_range
        if not 0.0 <= low <= high:
            raise ValidationError(f"invalid initial speed range {initial_speed_range}")
        self.initial_speed_range = (float(low), float(high))

        n = self.render_config.grid_size
        planes = len(CHANNELS) * self.render_config.n_frames
        self.observation_space = spaces.Dict(
            {
                "planes": spaces.Box(0, 1, shape=(planes, n, n), dtype=np.uint8),
                "scalars": spaces.Box(
                    -np.inf, np.inf, shape=(N_SCALARS,), dtype=np.float64
                ),
            }
        )
        self.action_space = spaces.Box(
            low=np.array([-ACC_LIMIT, -STEER_LIMIT]),
            high=np.array([ACC_LIMIT, STEER_LIMIT]),
            dtype=np.float64,
        )

        self.path: Optional[Path] = None
        self.state: Optional[VehicleState] = None
        self.observation: Optional[Observation] = None
        self.loc: Optional[LocalizationResult] = None
        self.elapsed = 0.0
        self.terminal = TerminalState.NONE

    def reset(
        self,
        *,
        seed: Optional[int] = None,
        options: Optional[Dict[str, Any]] = None,
    ) -> Tuple[Observation, Dict[str, Any]]:
        super().reset(seed=seed)
        options = options or {}
        self.path = options.get("path")
        if self.path is None:
            self.path = sample_path(self.scenario, self.np_random, self.path_config)
        if "initial_speed" in options:
            speed = float(options["initial_speed"])
        else:
            speed = float(self.np_random.uniform(*self.initial_speed_range))
        start = self.path.waypoints[0]
        self.state = VehicleState(
            x=float(start[0]), y=float(start[1]), heading=float(start[2]), speed=speed
        )
        self.actuation.reset(self.state)
        self.elapsed = 0.0
        self.terminal = TerminalState.NONE
        self.loc = localize(self.path, self.state.x, self.state.y, self.state.heading)
        self.observation = self._render(())
        return self.observation, self._info()

    def _render(self, history) -> Observation:
        return render_observation(
            self.scenario,
            self.path,
            self.state,
            frame_history=history,
            target_speed=float(self.path.speed_limits[self.loc.index]),
            config=self.render_config,
            wheelbase=self.vehicle.wheelbase,
        )

    def _info(self) -> Dict[str, Any]:
        return {
            "state": self.state,
            "loc": self.loc,
            "elapsed": self.elapsed,
            "terminal": self.terminal,
            "progress": self.loc.s / self.path.total_length,
            "scenario_id": self.scenario.scenario_id,
        }

    def advance(self, cmd_acc: float, cmd_steer: float) -> StepResult:
        """Run one tick with the given commands."""
        if self.state is None or self.path is None:
            raise ValidationError("reset() must be called before stepping")
        if self.terminal.is_terminal:
            raise ValidationError("episode already finished; call reset()")

        cmd_acc, cmd_steer = clamp_action(float(cmd_acc), float(cmd_steer))
        previous = self.state
        acc, steer = actuate(self.actuation, previous, cmd_acc, cmd_steer)
        moved = step_bicycle(
            previous.with_actuation(acc, steer), TICK, self.vehicle.wheelbase
        )
        self.state = moved.with_commands(cmd_acc, cmd_steer)
        self.elapsed = round(self.elapsed + TICK, 10)

        self.loc = localize(
            self.path, self.state.x, self.state.y, self.state.heading, s_hint=self.loc.s
        )
        self.terminal = check_terminal(
            self.loc, self.path, self.elapsed, self.terminal_config
        )
        self.observation = self._render(self.observation.history())

        target = self.observation.target_speed
        ctx = TransitionContext(
            sr=self.state.speed / target if target > 0.0 else 0.0,
            h_err=self.loc.h_err,
            d=self.loc.d,
            delta_acc_step=abs(cmd_acc - previous.last_cmd_acc),
            delta_sa_step=abs(cmd_steer - previous.last_cmd_steer),
            terminal=self.terminal,
        )
        rewards = compute_rewards(ctx, self.weights)
        return StepResult(
            observation=self.observation,
            rewards=rewards,
            terminal=self.terminal,
            loc=self.loc,
            state=self.state,
            elapsed=self.elapsed,
        )

    def step(self, action):
        """Gymnasium step; the scalar reward is r_acc + r_sa."""
        cmd_acc, cmd_steer = (float(v) for v in np.asarray(action, dtype=np.float64))
        result = self.advance(cmd_acc, cmd_steer)
        info = self._info()
        info["rewards"] = result.rewards
        terminated = result.terminal in (
            TerminalState.GOAL_REACHED,
            TerminalState.OFF_ROAD,
        )
        truncated = result.terminal is TerminalState.TIME_OVER
        reward = result.rewards.r_acc + result.rewards.r_sa
        return result.observation, reward, terminated, truncated, info


class SimulatorSettings(BaseModel):
    """Everything needed to build simulators for a set of scenarios."""

    weights: RewardWeights = Field(default_factory=RewardWeights)
    render: RenderConfig = Field(default_factory=RenderConfig)
    terminal: TerminalConfig = Field(default_factory=TerminalConfig)
    path: PathConfig = Field(default_factory=PathConfig)
    vehicle: VehicleConfig = Field(default_factory=VehicleConfig)
    actuation: ActuationSpec = Field(default_factory=ActuationSpec)
    initial_speed_min: float = Field(default=0.0, ge=0.0)
    initial_speed_max: float = Field(default=8.0, ge=0.0)

    def build(
        self,
        scenario: Scenario,
        make_actuation: Optional[Callable[[], ActuationModel]] = None,
    ) -> DrivingSimulator:
        make_actuation = make_actuation or actuation_factory(self.actuation)
        return DrivingSimulator(
            scenario,
            actuation=make_actuation(),
            weights=self.weights,
            render_config=self.render,
            terminal_config=self.terminal,
            path_config=self.path,
            vehicle=self.vehicle,
            initial_speed_range=(self.initial_speed_min, self.initial_speed_max),
        )

    def build_all(
        self,
        scenarios: Sequence[Scenario],
        make_actuation: Optional[Callable[[], ActuationModel]] = None,
    ) -> List[DrivingSimulator]:
        """One simulator per scenario, each with its own actuation model."""
        make_actuation = make_actuation or actuation_factory(self.actuation)
        return [self.build(s, make_actuation) for s in scenarios]
