"""D-A3C training, imitation pretraining and the global parameter store."""

from drive_planner.training.imitation import ILConfig, ILResult, il_pretrain
from drive_planner.training.models import (
    EpisodeStats,
    TrainConfig,
    TrainCurves,
    Transition,
)
from drive_planner.training.returns import compute_returns
from drive_planner.training.store import GlobalStore, apply_update
from drive_planner.training.trainer import TrainResult, train
from drive_planner.training.worker import run_worker_episode

__all__ = [
    "EpisodeStats",
    "GlobalStore",
    "ILConfig",
    "ILResult",
    "TrainConfig",
    "TrainCurves",
    "TrainResult",
    "Transition",
    "apply_update",
    "compute_returns",
    "il_pretrain",
    "run_worker_episode",
    "train",
]
