"""Rule-based experts: Pure Pursuit steering and free-road IDM acceleration."""

from drive_planner.experts.baseline import (
    BaselineResult,
    baseline_reward,
    run_expert_episode,
)
from drive_planner.experts.controllers import (
    ExpertDriver,
    idm_accel,
    pure_pursuit_steer,
)
from drive_planner.experts.dataset import (
    ILDataset,
    generate_il_dataset,
    load_il_dataset,
    save_il_dataset,
)
from drive_planner.experts.models import (
    DatasetConfig,
    ExpertConfig,
    IdmConfig,
    PurePursuitConfig,
)

__all__ = [
    "BaselineResult",
    "DatasetConfig",
    "ExpertConfig",
    "ExpertDriver",
    "ILDataset",
    "IdmConfig",
    "PurePursuitConfig",
    "baseline_reward",
    "generate_il_dataset",
    "idm_accel",
    "load_il_dataset",
    "pure_pursuit_steer",
    "run_expert_episode",
    "save_il_dataset",
]
