"""Tests for the per-head reward terms."""

import pytest

from drive_planner.environment.models import TerminalState
from drive_planner.rewards import (
    RewardPair,
    RewardWeights,
    TransitionContext,
    compute_rewards,
    r_indecision,
    r_localization,
    r_speed,
    terminal_reward,
)


class TestRewardWeights:
    def test_defaults(self):
        w = RewardWeights()
        assert (w.zeta, w.phi, w.chi, w.psi, w.lam) == (0.009, 0.05, 0.05, 0.1, 0.01)
        assert (w.delta_acc, w.delta_sa) == (0.5, 0.05)

    def test_lambda_alias(self):
        assert RewardWeights.model_validate({"lambda": 0.02}).lam == 0.02

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            RewardWeights(zeta=0.0)


class TestSpeedReward:
    @pytest.mark.parametrize(
        "sr, expected", [(0.0, 0.0), (1.0, 0.0), (0.5, 0.0045), (1.5, 0.0045)]
    )
    def test_values(self, sr, expected):
        assert r_speed(sr) == pytest.approx(expected, abs=1e-12)

    def test_branch_switches_at_limit(self):
        assert r_speed(1.0 - 1e-9) == pytest.approx(0.009, abs=1e-9)
        assert r_speed(1.0) == 0.0

    def test_penalize_overspeed_flag(self):
        weights = RewardWeights(penalize_overspeed=True)
        assert r_speed(1.5, weights) == pytest.approx(-0.0045)
        assert r_speed(0.5, weights) == pytest.approx(0.0045)


class TestLocalizationReward:
    def test_zero(self):
        assert r_localization(0.0, 0.0) == 0.0

    def test_penalty(self):
        assert r_localization(0.1, 0.5) == pytest.approx(-0.03)

    def test_symmetric(self):
        assert r_localization(-0.1, 0.5) == pytest.approx(-0.03)
        assert r_localization(0.1, -0.5) == pytest.approx(-0.03)


class TestIndecision:
    def test_below_threshold(self):
        assert r_indecision(0.3, 0.5, 0.1) == 0.0

    def test_acc_penalty(self):
        assert r_indecision(0.7, 0.5, 0.1) == pytest.approx(-0.02)

    def test_sa_penalty(self):
        assert r_indecision(0.1, 0.05, 0.01) == pytest.approx(-0.0005)

    @pytest.mark.parametrize("delta", [0.0, 0.2, 0.5, 0.51, 3.0])
    def test_never_positive(self, delta):
        value = r_indecision(delta, 0.5, 0.1)
        assert value <= 0.0
        assert (value == 0.0) == (delta <= 0.5)


class TestTerminalReward:
    @pytest.mark.parametrize(
        "terminal, expected",
        [
            (TerminalState.GOAL_REACHED, (1.0, 1.0)),
            (TerminalState.OFF_ROAD, (0.0, -1.0)),
            (TerminalState.TIME_OVER, (-1.0, 0.0)),
            (TerminalState.NONE, (0.0, 0.0)),
        ],
    )
    def test_values(self, terminal, expected):
        assert terminal_reward(terminal).as_tuple() == expected


class TestComputeRewards:
    def test_all_terms_vanish(self):
        pair = compute_rewards(TransitionContext(sr=1.0, h_err=0.0, d=0.0))
        assert pair.as_tuple() == (0.0, 0.0)

    def test_combined_example(self):
        ctx = TransitionContext(
            sr=0.5, d=0.5, h_err=0.1, delta_acc_step=0.7, delta_sa_step=0.1
        )
        pair = compute_rewards(ctx)
        assert pair.r_acc == pytest.approx(-0.0155)
        assert pair.r_sa == pytest.approx(-0.0305)

    def test_additivity(self):
        ctx = TransitionContext(
            sr=1.3,
            d=-0.8,
            h_err=0.25,
            delta_acc_step=0.9,
            delta_sa_step=0.02,
            terminal=TerminalState.OFF_ROAD,
        )
        w = RewardWeights()
        pair = compute_rewards(ctx, w)
        expected_acc = r_speed(1.3, w) + r_indecision(0.9, w.delta_acc, w.psi) + 0.0
        expected_sa = (
            r_localization(0.25, -0.8, w) + r_indecision(0.02, w.delta_sa, w.lam) - 1.0
        )
        assert pair.r_acc == pytest.approx(expected_acc, abs=1e-15)
        assert pair.r_sa == pytest.approx(expected_sa, abs=1e-15)

    def test_rejects_negative_speed_ratio(self):
        with pytest.raises(ValueError):
            TransitionContext(sr=-0.1, h_err=0.0, d=0.0)

    def test_rejects_non_finite_offset(self):
        with pytest.raises(ValueError):
            TransitionContext(sr=0.5, h_err=0.0, d=float("nan"))

    def test_pair_addition(self):
        assert (RewardPair(1.0, 2.0) + RewardPair(0.5, -1.0)).as_tuple() == (1.5, 1.0)
