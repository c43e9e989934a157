"""Rule-based reference reward for the training curves."""

from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from drive_planner.dynamics.actuation import actuation_factory
from drive_planner.environment.models import Scenario, TerminalState
from drive_planner.environment.simulator import SimulatorSettings
from drive_planner.experts.controllers import ExpertDriver
from drive_planner.experts.models import ExpertConfig
from drive_planner.utils.errors import ValidationError
from drive_planner.utils.logger import episode_context, get_logger
from drive_planner.utils.seeding import derive_seed, make_rng

logger = get_logger(__name__)

BASELINE_STREAM = 3


class ExpertEpisode(BaseModel):
    episode: int
    scenario_id: str
    terminal: TerminalState
    steps: int
    sum_r_acc: float
    sum_r_sa: float


class BaselineResult(BaseModel):
    """Per-head episode reward averaged over expert episodes."""

    n_episodes: int
    avg_r_acc: float
    avg_r_sa: float
    goal_rate: float
    episodes: List[ExpertEpisode]


def run_expert_episode(
    episode: int,
    scenarios: Sequence[Scenario],
    settings: SimulatorSettings,
    seed: int,
    expert: Optional[ExpertConfig] = None,
    make_actuation=None,
) -> ExpertEpisode:
    """Drive one expert episode and score it with the simulator's rewards."""
    rng = make_rng(seed, BASELINE_STREAM, episode)
    scenario = scenarios[int(rng.integers(len(scenarios)))]
    sim = settings.build(scenario, make_actuation)
    driver = ExpertDriver(expert)
    sim.reset(seed=derive_seed(seed, BASELINE_STREAM, episode))
    sum_acc = sum_sa = 0.0
    steps = 0
    while True:
        cmd_acc, cmd_steer = driver.act(sim.state, sim.path, sim.loc)
        result = sim.advance(cmd_acc, cmd_steer)
        sum_acc += result.rewards.r_acc
        sum_sa += result.rewards.r_sa
        steps += 1
        if result.done:
            break
    return ExpertEpisode(
        episode=episode,
        scenario_id=scenario.scenario_id,
        terminal=result.terminal,
        steps=steps,
        sum_r_acc=sum_acc,
        sum_r_sa=sum_sa,
    )


def baseline_reward(
    scenarios: Sequence[Scenario],
    n_episodes: int,
    seed: int = 0,
    settings: Optional[SimulatorSettings] = None,
    expert: Optional[ExpertConfig] = None,
) -> BaselineResult:
    """Average per-head episode reward of the expert over ``n_episodes``."""
    if n_episodes < 1:
        raise ValidationError(f"n_episodes must be at least 1, got {n_episodes}")
    if not scenarios:
        raise ValidationError("baseline_reward needs at least one scenario")
    settings = settings or SimulatorSettings()
    make_actuation = actuation_factory(settings.actuation)
    episodes = []
    for e in range(n_episodes):
        with episode_context(0, e):
            episodes.append(
                run_expert_episode(e, scenarios, settings, seed, expert, make_actuation)
            )
    result = BaselineResult(
        n_episodes=n_episodes,
        avg_r_acc=float(np.mean([ep.sum_r_acc for ep in episodes])),
        avg_r_sa=float(np.mean([ep.sum_r_sa for ep in episodes])),
        goal_rate=float(
            np.mean([ep.terminal is TerminalState.GOAL_REACHED for ep in episodes])
        ),
        episodes=episodes,
    )
    logger.info(
        f"Expert baseline over {n_episodes} episodes: R_acc={result.avg_r_acc:.3f}, "
        f"R_sa={result.avg_r_sa:.3f}, goal rate {result.goal_rate:.2%}"
    )
    return result
