"""Greedy-policy evaluation: per-scenario outcome counts, tracking and smoothness."""

import csv
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from drive_planner.dynamics.actuation import actuation_factory
from drive_planner.environment.models import Scenario, TerminalState
from drive_planner.environment.simulator import SimulatorSettings
from drive_planner.policy.network import forward, sample_action
from drive_planner.policy.params import NetParams
from drive_planner.utils.logger import episode_context, get_logger
from drive_planner.utils.seeding import derive_seed, make_rng

logger = get_logger(__name__)

EVAL_STREAM = 5
TRACE_HEADER = (
    "t",
    "speed",
    "target_speed",
    "cmd_acc",
    "actual_acc",
    "cmd_steer",
    "actual_steer",
    "d",
    "h_err",
)


class EvalConfig(BaseModel):
    episodes_per_scenario: int = Field(default=10, ge=1)
    compliance_ratio: float = Field(default=1.05, gt=0.0)
    delta_acc: float = Field(default=0.5, gt=0.0)
    greedy: bool = True
    seed: int = Field(default=0, ge=0)


class ScenarioReport(BaseModel):
    """Outcome of every evaluation episode on one scenario."""

    scenario_id: str
    episodes: int = Field(ge=0)
    goal_reached: int = Field(ge=0)
    off_road: int = Field(ge=0)
    time_over: int = Field(ge=0)
    mean_abs_d: float = Field(ge=0.0)
    mean_abs_delta_acc: float = Field(ge=0.0)
    speed_compliance: float = Field(ge=0.0, le=1.0)
    delta_acc_exceeded: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _counts_add_up(self) -> "ScenarioReport":
        if self.goal_reached + self.off_road + self.time_over != self.episodes:
            raise ValueError("terminal counts must sum to the episode count")
        return self

    @property
    def goal_rate(self) -> float:
        return self.goal_reached / self.episodes if self.episodes else 0.0


class TraceRow(BaseModel):
    t: float
    speed: float
    target_speed: float
    cmd_acc: float
    actual_acc: float
    cmd_steer: float
    actual_steer: float
    d: float
    h_err: float


class EvalReport(BaseModel):
    actuation: str = ""
    scenarios: List[ScenarioReport] = Field(default_factory=list)
    traces: Dict[str, List[TraceRow]] = Field(default_factory=dict)

    def to_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "actuation": self.actuation,
            "scenarios": [
                {**s.model_dump(mode="json"), "goal_rate": s.goal_rate}
                for s in self.scenarios
            ],
        }
        path.write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        return path

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fields = list(ScenarioReport.model_fields)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(fields)
            for s in self.scenarios:
                writer.writerow([getattr(s, name) for name in fields])
        return path

    def write_traces(self, directory: Union[str, Path]) -> List[Path]:
        """One ``trace_<scenario>.csv`` per scenario (first episode, per tick)."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for scenario_id, rows in sorted(self.traces.items()):
            path = directory / f"trace_{scenario_id}.csv"
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(TRACE_HEADER)
                for row in rows:
                    writer.writerow([f"{getattr(row, k):.9g}" for k in TRACE_HEADER])
            written.append(path)
        return written


def _evaluate_scenario(
    params: NetParams,
    scenario: Scenario,
    index: int,
    settings: SimulatorSettings,
    config: EvalConfig,
    make_actuation,
):
    sim = settings.build(scenario, make_actuation)
    counts = {state: 0 for state in TerminalState if state.is_terminal}
    abs_d: List[float] = []
    deltas: List[float] = []
    compliant: List[bool] = []
    trace: List[TraceRow] = []

    for episode in range(config.episodes_per_scenario):
        with episode_context(index, episode):
            rng = make_rng(config.seed, EVAL_STREAM, index, episode)
            episode_seed = derive_seed(config.seed, EVAL_STREAM, index, episode)
            obs, _ = sim.reset(seed=episode_seed)
            previous_cmd: Optional[float] = None
            while True:
                action = sample_action(forward(params, obs), rng, greedy=config.greedy)
                result = sim.advance(action.acc, action.sa)
                state = result.state
                abs_d.append(abs(result.loc.d))
                if previous_cmd is not None:
                    deltas.append(abs(state.last_cmd_acc - previous_cmd))
                previous_cmd = state.last_cmd_acc
                target = result.observation.target_speed
                compliant.append(
                    target <= 0.0 or state.speed / target <= config.compliance_ratio
                )
                if episode == 0:
                    trace.append(
                        TraceRow(
                            t=result.elapsed,
                            speed=state.speed,
                            target_speed=target,
                            cmd_acc=state.last_cmd_acc,
                            actual_acc=state.actual_acc,
                            cmd_steer=state.last_cmd_steer,
                            actual_steer=state.actual_steer,
                            d=result.loc.d,
                            h_err=result.loc.h_err,
                        )
                    )
                obs = result.observation
                if result.done:
                    counts[result.terminal] += 1
                    break

    deltas_arr = np.asarray(deltas)
    report = ScenarioReport(
        scenario_id=scenario.scenario_id,
        episodes=config.episodes_per_scenario,
        goal_reached=counts[TerminalState.GOAL_REACHED],
        off_road=counts[TerminalState.OFF_ROAD],
        time_over=counts[TerminalState.TIME_OVER],
        mean_abs_d=float(np.mean(abs_d)),
        mean_abs_delta_acc=float(np.mean(deltas_arr)) if deltas else 0.0,
        speed_compliance=float(np.mean(compliant)),
        delta_acc_exceeded=(
            float(np.mean(deltas_arr > config.delta_acc)) if deltas else 0.0
        ),
    )
    return report, trace


def evaluate(
    params: NetParams,
    scenarios: Sequence[Scenario],
    settings: Optional[SimulatorSettings] = None,
    config: Optional[EvalConfig] = None,
) -> EvalReport:
    """
    Roll out the policy on each scenario and aggregate the outcomes.

    Actions are the head means unless ``config.greedy`` is off. Acceleration
    deltas are measured between consecutive ticks of an episode.
    """
    settings = settings or SimulatorSettings()
    config = config or EvalConfig()
    report = EvalReport(actuation=settings.actuation.kind)
    if not scenarios:
        return report
    make_actuation = actuation_factory(settings.actuation)
    for index, scenario in enumerate(scenarios):
        scenario_report, trace = _evaluate_scenario(
            params, scenario, index, settings, config, make_actuation
        )
        report.scenarios.append(scenario_report)
        report.traces[scenario.scenario_id] = trace
        logger.info(
            f"{scenario.scenario_id}: goal {scenario_report.goal_reached}/"
            f"{scenario_report.episodes}, mean |d| {scenario_report.mean_abs_d:.3f} m"
        )
    return report
