"""Discounted returns and advantages per head."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from drive_planner.training.models import Transition


@dataclass(frozen=True)
class Returns:
    """(T, 2) arrays with columns (acc, sa)."""

    targets: np.ndarray
    advantages: np.ndarray


def discounted_returns(
    rewards: np.ndarray, bootstrap: float, gamma: float
) -> np.ndarray:
    """Backward recursion R <- r + gamma * R starting from ``bootstrap``."""
    out = np.empty(len(rewards))
    running = bootstrap
    for t in range(len(rewards) - 1, -1, -1):
        running = rewards[t] + gamma * running
        out[t] = running
    return out


def compute_returns(
    transitions: Sequence[Transition],
    bootstrap_v_acc: float,
    bootstrap_v_sa: float,
    gamma: float,
) -> Returns:
    """
    n-step targets and advantages (target - v_t) for both heads.

    Pass zero bootstrap values when the segment ends the episode.
    """
    if not transitions:
        raise ValueError("compute_returns needs at least one transition")
    r_acc = np.array([t.r_acc for t in transitions])
    r_sa = np.array([t.r_sa for t in transitions])
    v = np.array([(t.v_acc, t.v_sa) for t in transitions])
    targets = np.column_stack(
        (
            discounted_returns(r_acc, bootstrap_v_acc, gamma),
            discounted_returns(r_sa, bootstrap_v_sa, gamma),
        )
    )
    return Returns(targets=targets, advantages=targets - v)
