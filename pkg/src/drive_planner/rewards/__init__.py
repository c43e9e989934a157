"""Dual reward signals for the acceleration and steering heads."""

from drive_planner.rewards.models import RewardPair, RewardWeights, TransitionContext
from drive_planner.rewards.shaping import (
    compute_rewards,
    r_indecision,
    r_localization,
    r_speed,
    terminal_reward,
)

__all__ = [
    "RewardPair",
    "RewardWeights",
    "TransitionContext",
    "compute_rewards",
    "r_indecision",
    "r_localization",
    "r_speed",
    "terminal_reward",
]
