"""
D-A3C training loop.

Episodes are processed in rounds of ``n_workers``. In the ``sequential``
scheduler every worker of a round reads the same global version, runs its
episode, and the accumulated gradients are applied in worker order. The
``threaded`` scheduler runs the round's episodes on a thread pool and each
worker applies its update as soon as its episode ends. Checkpoints are taken
at round boundaries, so a resumed sequential run continues identically.
"""

import json
import subprocess  # nosec B404
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import (
    Any,
    Callable,
    Deque,
    Dict,
    List,
    Literal,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from drive_planner.dynamics.actuation import actuation_factory
from drive_planner.environment.models import CHANNELS, Scenario
from drive_planner.environment.simulator import DrivingSimulator, SimulatorSettings
from drive_planner.experts.dataset import ILDataset
from drive_planner.policy.architecture import NetArchitecture, build_architecture
from drive_planner.policy.checkpoint import load_checkpoint, save_checkpoint
from drive_planner.policy.optim import build_optimizer
from drive_planner.policy.params import NetParams, init_params
from drive_planner.training.imitation import ILConfig, il_pretrain
from drive_planner.training.models import (
    CurveRow,
    EpisodeStats,
    TrainConfig,
    TrainCurves,
)
from drive_planner.training.store import GlobalStore
from drive_planner.training.worker import WorkerResult, run_worker_episode
from drive_planner.utils.errors import (
    CheckpointError,
    MissingPrerequisiteError,
    ValidationError,
)
from drive_planner.utils.logger import get_logger
from drive_planner.utils.seeding import make_rng

logger = get_logger(__name__)

TrainMode = Literal["pure_rl", "il_then_rl"]
INIT_STREAM = 0
CURVES_NAME = "curves.csv"
METADATA_NAME = "run_metadata.json"


@dataclass
class TrainResult:
    curves: TrainCurves
    params: NetParams
    store: GlobalStore
    episodes: List[EpisodeStats] = field(default_factory=list)

    @property
    def discarded(self) -> int:
        return sum(1 for e in self.episodes if e.discarded)


class _CurveWindow:
    """Rolling window over non-discarded episodes; emits one row per full window."""

    def __init__(self, window: int, curves: TrainCurves, buffer=()):
        self.window = window
        self.curves = curves
        self.buffer: Deque[Tuple[bool, float, float]] = deque(
            (bool(s), float(a), float(b)) for s, a, b in buffer
        )

    def add(self, stats: EpisodeStats, version: int) -> Optional[CurveRow]:
        if stats.discarded:
            return None
        self.buffer.append((stats.success, stats.sum_r_acc, stats.sum_r_sa))
        if len(self.buffer) < self.window:
            return None
        success, r_acc, r_sa = (np.array(col) for col in zip(*self.buffer))
        row = CurveRow(
            episode=stats.episode + 1,
            window_success=float(np.mean(success)),
            avg_r_acc=float(np.mean(r_acc)),
            avg_r_sa=float(np.mean(r_sa)),
            version=version,
        )
        self.curves.rows.append(row)
        self.buffer.clear()
        return row

    def state(self) -> List[List[Any]]:
        return [list(item) for item in self.buffer]


def git_revision() -> Optional[str]:
    """Current commit hash, or None outside a git checkout."""
    try:
        completed = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            capture_output=True,
            text=True,
            check=True,
            timeout=5,
        )  # nosec B603, B607
    except (OSError, subprocess.SubprocessError):
        return None
    return completed.stdout.strip() or None


def network_architecture(
    config: TrainConfig, settings: SimulatorSettings
) -> NetArchitecture:
    render = settings.render
    return build_architecture(
        config.network, render.grid_size, len(CHANNELS) * render.n_frames
    )


def initial_parameters(
    mode: TrainMode,
    architecture: NetArchitecture,
    config: TrainConfig,
    initial_params: Optional[NetParams] = None,
    il_dataset: Optional[ILDataset] = None,
    il_config: Optional[ILConfig] = None,
) -> NetParams:
    """Random weights for pure_rl; pretrained weights for il_then_rl."""
    if mode == "pure_rl":
        if initial_params is not None:
            return initial_params
        return init_params(architecture, make_rng(config.seed, INIT_STREAM))
    if mode != "il_then_rl":
        raise ValidationError(
            f"Unknown training mode: '{mode}'. Available: pure_rl, il_then_rl"
        )
    if initial_params is not None:
        return initial_params
    if il_dataset is None:
        raise MissingPrerequisiteError(
            "il_then_rl needs an IL dataset or a pretrained checkpoint",
            details={"missing": ["il_dataset", "init_checkpoint"]},
        )
    return il_pretrain(il_dataset, il_config, architecture=architecture).params


def _save_round_checkpoint(
    path: Path,
    store: GlobalStore,
    config: TrainConfig,
    mode: str,
    next_episode: int,
    window: _CurveWindow,
    discarded: int,
) -> Path:
    metadata = {
        "mode": mode,
        "next_episode": next_episode,
        "version": store.version,
        "seed": config.seed,
        "discarded": discarded,
        "curve_rows": [r.model_dump(mode="json") for r in window.curves.rows],
        "window_buffer": window.state(),
        "train_config": config.model_dump(mode="json"),
    }
    return save_checkpoint(path, store.params, store.optimizer.state_arrays(), metadata)


def _check_resume(metadata: Dict[str, Any], config: TrainConfig) -> None:
    missing = [k for k in ("next_episode", "version", "seed") if k not in metadata]
    if missing:
        raise CheckpointError(
            "checkpoint has no training state to resume from",
            details={"missing": missing},
        )
    if int(metadata["seed"]) != config.seed:
        raise CheckpointError(
            "resume seed differs from the checkpoint seed",
            details={"checkpoint_seed": metadata["seed"], "seed": config.seed},
        )


def train(
    mode: TrainMode,
    scenarios: Sequence[Scenario],
    config: Optional[TrainConfig] = None,
    settings: Optional[SimulatorSettings] = None,
    initial_params: Optional[NetParams] = None,
    il_dataset: Optional[ILDataset] = None,
    il_config: Optional[ILConfig] = None,
    out_dir: Optional[Union[str, Path]] = None,
    resume_from: Optional[Union[str, Path]] = None,
    on_episode: Optional[Callable[[EpisodeStats], None]] = None,
) -> TrainResult:
    """
    Train a policy with D-A3C and return the windowed curves.

    With ``out_dir`` set, ``curves.csv``, ``run_metadata.json`` and
    checkpoints under ``checkpoints/`` are written there.
    """
    config = config or TrainConfig()
    settings = settings or SimulatorSettings()
    if not scenarios and config.max_episodes > 0:
        raise ValidationError("train needs at least one scenario")
    architecture = network_architecture(config, settings)
    optimizer = build_optimizer(config.optimizer, architecture)

    curves = TrainCurves(window=config.window)
    start_episode = 0
    discarded = 0
    buffer: Sequence = ()
    if resume_from is not None:
        checkpoint = load_checkpoint(resume_from, expected=architecture)
        _check_resume(checkpoint.metadata, config)
        params = checkpoint.params
        optimizer.load_state(checkpoint.optimizer_state)
        version = int(checkpoint.metadata["version"])
        start_episode = int(checkpoint.metadata["next_episode"])
        discarded = int(checkpoint.metadata.get("discarded", 0))
        curves.rows = [
            CurveRow.model_validate(r)
            for r in checkpoint.metadata.get("curve_rows", [])
        ]
        buffer = checkpoint.metadata.get("window_buffer", [])
        logger.info(
            f"Resuming from {resume_from} at episode {start_episode} "
            f"(version {version})"
        )
    else:
        params = initial_parameters(
            mode, architecture, config, initial_params, il_dataset, il_config
        )
        version = 0
    if params.architecture != architecture:
        raise CheckpointError("initial parameters do not match the configured network")

    store = GlobalStore(params, optimizer, version=version)
    window = _CurveWindow(config.window, curves, buffer)
    make_actuation = actuation_factory(settings.actuation)
    pools: List[List[DrivingSimulator]] = [
        settings.build_all(scenarios, make_actuation) for _ in range(config.n_workers)
    ] if scenarios else []
    checkpoint_dir = Path(out_dir) / "checkpoints" if out_dir is not None else None

    episodes: List[EpisodeStats] = []

    def finish(result: WorkerResult) -> Optional[int]:
        stats = result.stats
        lr = config.learning_rate_at(stats.episode)
        if result.grads is None:
            return None
        grads = result.grads.clip_by_global_norm(config.grad_clip)
        return store.apply_update(
            grads,
            lr,
            episode=stats.episode,
            worker_id=stats.worker_id,
            base_version=result.base_version,
        )

    def record(stats: EpisodeStats) -> None:
        nonlocal discarded
        episodes.append(stats)
        if stats.discarded:
            discarded += 1
        row = window.add(stats, store.version)
        if row is not None:
            logger.info(
                f"Episodes up to {row.episode}: success {row.window_success:.2%}, "
                f"R_acc {row.avg_r_acc:.3f}, R_sa {row.avg_r_sa:.3f}, "
                f"version {row.version}"
            )
        if on_episode is not None:
            on_episode(stats)

    executor = (
        ThreadPoolExecutor(max_workers=config.n_workers, thread_name_prefix="worker")
        if config.scheduler == "threaded"
        else None
    )
    try:
        episode = start_episode
        while episode < config.max_episodes:
            count = min(config.n_workers, config.max_episodes - episode)
            round_episodes = range(episode, episode + count)
            if executor is None:
                results = [
                    run_worker_episode(w, pools[w], store, config, e)
                    for w, e in enumerate(round_episodes)
                ]
                for result in results:
                    finish(result)
                    record(result.stats)
            else:

                def job(worker: int, ep: int) -> WorkerResult:
                    result = run_worker_episode(
                        worker, pools[worker], store, config, ep
                    )
                    finish(result)
                    return result

                futures = [
                    executor.submit(job, w, e) for w, e in enumerate(round_episodes)
                ]
                for future in futures:
                    record(future.result().stats)

            previous = episode
            episode += count
            if checkpoint_dir is not None and (
                episode // config.checkpoint_every > previous // config.checkpoint_every
            ):
                path = _save_round_checkpoint(
                    checkpoint_dir / f"policy_ep{episode:06d}.dppf",
                    store,
                    config,
                    mode,
                    episode,
                    window,
                    discarded,
                )
                logger.info(f"Checkpoint written to {path}")
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    result = TrainResult(
        curves=curves, params=store.params, store=store, episodes=episodes
    )
    if out_dir is not None:
        out = Path(out_dir)
        curves.to_csv(out / CURVES_NAME)
        final = _save_round_checkpoint(
            out / "checkpoints" / "final.dppf",
            store,
            config,
            mode,
            max(config.max_episodes, start_episode),
            window,
            discarded,
        )
        write_run_metadata(
            out / METADATA_NAME,
            {
                "mode": mode,
                "seed": config.seed,
                "git_revision": git_revision(),
                "episodes_run": len(episodes),
                "discarded_episodes": discarded,
                "final_version": store.version,
                "resumed_from": str(resume_from) if resume_from is not None else None,
                "start_episode": start_episode,
                "final_checkpoint": final.name,
                "scenarios": [s.scenario_id for s in scenarios],
                "train_config": config.model_dump(mode="json"),
            },
        )
    logger.info(
        f"Training finished: {len(episodes)} episodes, {discarded} discarded, "
        f"version {store.version}"
    )
    return result


def write_run_metadata(path: Path, metadata: Dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(metadata, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return path
