"""
One D-A3C worker episode.

The worker snapshots the global parameters once, drives with a local copy,
and every ``local_update_interval`` steps computes segment gradients, folds
them into its accumulator and descends on the local copy. The global store
is not touched again until the accumulated gradients are handed back.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from drive_planner.environment.models import Observation
from drive_planner.environment.simulator import DrivingSimulator
from drive_planner.policy.network import (
    LossCoeffs,
    backward_rl_batch,
    forward,
    sample_action,
)
from drive_planner.policy.params import Gradients, NetParams
from drive_planner.training.models import EpisodeStats, TrainConfig, Transition
from drive_planner.training.returns import compute_returns
from drive_planner.training.store import GlobalStore
from drive_planner.utils.errors import NonFiniteLossError
from drive_planner.utils.logger import episode_context, get_logger
from drive_planner.utils.seeding import derive_seed, make_rng

logger = get_logger(__name__)

EPISODE_STREAM = 1


@dataclass
class WorkerResult:
    stats: EpisodeStats
    grads: Optional[Gradients]
    base_version: int


def episode_rng(seed: int, episode: int) -> np.random.Generator:
    """Action-sampling stream of one episode; independent of the worker running it."""
    return make_rng(seed, EPISODE_STREAM, episode)


def _segment_gradients(
    params: NetParams,
    segment: Sequence[Transition],
    bootstrap: Observation,
    done: bool,
    config: TrainConfig,
    coeffs: LossCoeffs,
) -> Gradients:
    if done:
        v_acc = v_sa = 0.0
    else:
        tail = forward(params, bootstrap)
        v_acc, v_sa = tail.v_acc, tail.v_sa
    returns = compute_returns(segment, v_acc, v_sa, config.gamma)
    raw_actions = np.array([(t.action.raw_acc, t.action.raw_sa) for t in segment])
    _, grads = backward_rl_batch(
        params,
        [t.obs for t in segment],
        raw_actions,
        returns.advantages,
        returns.targets,
        coeffs,
    )
    return grads


def run_worker_episode(
    worker_id: int,
    simulators: Sequence[DrivingSimulator],
    store: GlobalStore,
    config: TrainConfig,
    episode: int,
    lr: Optional[float] = None,
) -> WorkerResult:
    """
    Run one episode for ``worker_id`` and return its stats and the
    accumulated gradients (None when the episode was discarded).

    The scenario, path, initial speed and action noise all come from
    streams keyed by (seed, episode), so an episode replays identically
    whichever worker runs it.
    """
    if not simulators:
        raise ValueError("run_worker_episode needs at least one simulator")
    lr = config.learning_rate_at(episode) if lr is None else lr
    coeffs = LossCoeffs(
        value_coeff=config.value_coeff, entropy_coeff=config.entropy_coeff
    )
    rng = episode_rng(config.seed, episode)

    with episode_context(worker_id, episode):
        sim = simulators[int(rng.integers(len(simulators)))]
        params, version = store.snapshot(episode=episode, worker_id=worker_id)
        local = params
        accumulated: Optional[Gradients] = None
        segment: List[Transition] = []
        sum_acc = sum_sa = 0.0
        steps = 0

        obs, _ = sim.reset(seed=derive_seed(config.seed, EPISODE_STREAM, episode))
        result = None
        try:
            while True:
                out = forward(local, obs)
                action = sample_action(out, rng)
                result = sim.advance(action.acc, action.sa)
                steps += 1
                sum_acc += result.rewards.r_acc
                sum_sa += result.rewards.r_sa
                segment.append(
                    Transition(
                        obs=obs,
                        action=action,
                        r_acc=result.rewards.r_acc,
                        r_sa=result.rewards.r_sa,
                        v_acc=out.v_acc,
                        v_sa=out.v_sa,
                        done=result.done,
                    )
                )
                obs = result.observation
                if result.done or len(segment) == config.local_update_interval:
                    grads = _segment_gradients(
                        local, segment, obs, result.done, config, coeffs
                    )
                    accumulated = grads if accumulated is None else accumulated + grads
                    local = local.zip_map(grads, lambda p, g: p - lr * g)
                    segment = []
                if result.done:
                    break
        except NonFiniteLossError as e:
            logger.warning(
                f"Discarding episode {episode} after {steps} steps: {e.message}"
            )
            stats = EpisodeStats(
                episode=episode,
                worker_id=worker_id,
                scenario_id=sim.scenario.scenario_id,
                terminal=result.terminal if result is not None else sim.terminal,
                sum_r_acc=sum_acc if np.isfinite(sum_acc) else 0.0,
                sum_r_sa=sum_sa if np.isfinite(sum_sa) else 0.0,
                steps=max(steps, 1),
                progress=_progress(sim),
                version_read=version,
                discarded=True,
            )
            return WorkerResult(stats=stats, grads=None, base_version=version)

        stats = EpisodeStats(
            episode=episode,
            worker_id=worker_id,
            scenario_id=sim.scenario.scenario_id,
            terminal=result.terminal,
            sum_r_acc=sum_acc,
            sum_r_sa=sum_sa,
            steps=steps,
            progress=_progress(sim),
            version_read=version,
        )
        logger.debug(
            f"Episode {episode} finished: {stats.terminal.value} after {steps} steps "
            f"(R_acc={sum_acc:.3f}, R_sa={sum_sa:.3f})"
        )
        return WorkerResult(stats=stats, grads=accumulated, base_version=version)


def _progress(sim: DrivingSimulator) -> float:
    return float(min(max(sim.loc.s / sim.path.total_length, 0.0), 1.0))
