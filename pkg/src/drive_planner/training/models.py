"""Trainer settings, per-step transitions, per-episode stats and curves."""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field

from drive_planner.environment.models import Observation, TerminalState
from drive_planner.policy.network import Action

CURVE_HEADER = ("episode", "window_success", "avg_r_acc", "avg_r_sa", "version")


class TrainConfig(BaseModel):
    """D-A3C settings."""

    gamma: float = Field(default=0.99, ge=0.0, le=1.0)
    n_workers: int = Field(default=8, ge=1)
    local_update_interval: int = Field(default=20, ge=1)
    learning_rate: float = Field(default=7e-4, gt=0.0)
    anneal_lr: bool = True
    entropy_coeff: float = Field(default=1e-3, ge=0.0)
    value_coeff: float = Field(default=0.5, ge=0.0)
    max_episodes: int = Field(default=2000, ge=0)
    tick: float = Field(default=0.1, gt=0.0)
    seed: int = Field(default=0, ge=0)
    optimizer: Literal["plain", "rmsprop"] = "rmsprop"
    grad_clip: Optional[float] = Field(default=40.0, gt=0.0)
    scheduler: Literal["sequential", "threaded"] = "sequential"
    window: int = Field(default=100, ge=1)
    checkpoint_every: int = Field(default=500, ge=1)
    network: Literal["default", "small"] = "default"

    def learning_rate_at(self, episode: int) -> float:
        """Linearly annealed rate for a 0-based episode index."""
        if not self.anneal_lr or self.max_episodes == 0:
            return self.learning_rate
        return self.learning_rate * max(0.0, 1.0 - episode / self.max_episodes)


@dataclass(frozen=True)
class Transition:
    obs: Observation
    action: Action
    r_acc: float
    r_sa: float
    v_acc: float
    v_sa: float
    done: bool


class EpisodeStats(BaseModel):
    """Outcome of one episode."""

    episode: int
    worker_id: int = 0
    scenario_id: str = ""
    terminal: TerminalState
    sum_r_acc: float
    sum_r_sa: float
    steps: int = Field(ge=1)
    progress: float = Field(ge=0.0, le=1.0)
    version_read: int = 0
    discarded: bool = False

    @property
    def success(self) -> bool:
        return self.terminal is TerminalState.GOAL_REACHED


class UpdateRecord(BaseModel):
    """One applied global update."""

    version: int
    base_version: int
    episode: int
    worker_id: int


class ReadRecord(BaseModel):
    """One global snapshot taken by a worker episode."""

    version: int
    episode: int
    worker_id: int


class CurveRow(BaseModel):
    episode: int
    window_success: float = Field(ge=0.0, le=1.0)
    avg_r_acc: float
    avg_r_sa: float
    version: int


class TrainCurves(BaseModel):
    """Windowed success rate and average per-head episode reward."""

    window: int = 100
    rows: List[CurveRow] = Field(default_factory=list)

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CURVE_HEADER)
            for row in self.rows:
                writer.writerow(
                    (
                        row.episode,
                        f"{row.window_success:.6f}",
                        f"{row.avg_r_acc:.9f}",
                        f"{row.avg_r_sa:.9f}",
                        row.version,
                    )
                )
        return path

    @classmethod
    def from_csv(cls, path: Union[str, Path], window: int = 100) -> "TrainCurves":
        with Path(path).open("r", encoding="utf-8") as handle:
            rows = [
                CurveRow(
                    episode=int(r["episode"]),
                    window_success=float(r["window_success"]),
                    avg_r_acc=float(r["avg_r_acc"]),
                    avg_r_sa=float(r["avg_r_sa"]),
                    version=int(r["version"]),
                )
                for r in csv.DictReader(handle)
            ]
        return cls(window=window, rows=rows)

    def first_episode_reaching(self, success: float) -> Optional[int]:
        """Episode count of the first window at or above ``success``."""
        for row in self.rows:
            if row.window_success >= success:
                return row.episode
        return None
