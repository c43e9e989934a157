"""
Per-head reward terms.

    R_acc = r_speed + r_acc_indecision + r_terminal.acc
    R_sa  = r_localization + r_sa_indecision + r_terminal.sa
"""

from drive_planner.environment.models import TerminalState
from drive_planner.rewards.models import RewardPair, RewardWeights, TransitionContext

_DEFAULT_WEIGHTS = RewardWeights()

_TERMINAL_REWARDS = {
    TerminalState.GOAL_REACHED: RewardPair(1.0, 1.0),
    TerminalState.OFF_ROAD: RewardPair(0.0, -1.0),
    TerminalState.TIME_OVER: RewardPair(-1.0, 0.0),
    TerminalState.NONE: RewardPair(0.0, 0.0),
}


def r_speed(sr: float, weights: RewardWeights = _DEFAULT_WEIGHTS) -> float:
    """sr * zeta below the limit, (sr - 1) * zeta at or above it."""
    if sr < 1.0:
        return sr * weights.zeta
    overspeed = (sr - 1.0) * weights.zeta
    return -overspeed if weights.penalize_overspeed else overspeed


def r_localization(
    h_err: float, d: float, weights: RewardWeights = _DEFAULT_WEIGHTS
) -> float:
    """Penalty on heading error and lateral offset."""
    return -(weights.phi * abs(h_err) + weights.chi * abs(d))


def r_indecision(delta_step: float, threshold: float, coeff: float) -> float:
    """coeff * min(0, threshold - delta_step); never positive."""
    return coeff * min(0.0, threshold - delta_step)


def terminal_reward(terminal: TerminalState) -> RewardPair:
    return _TERMINAL_REWARDS[TerminalState(terminal)]


def compute_rewards(
    ctx: TransitionContext, weights: RewardWeights = _DEFAULT_WEIGHTS
) -> RewardPair:
    """Sum the per-head terms for one transition."""
    terminal = terminal_reward(ctx.terminal)
    r_acc = (
        r_speed(ctx.sr, weights)
        + r_indecision(ctx.delta_acc_step, weights.delta_acc, weights.psi)
        + terminal.r_acc
    )
    r_sa = (
        r_localization(ctx.h_err, ctx.d, weights)
        + r_indecision(ctx.delta_sa_step, weights.delta_sa, weights.lam)
        + terminal.r_sa
    )
    return RewardPair(r_acc, r_sa)
