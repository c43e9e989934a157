"""Tests for the gymnasium driving simulator."""

import numpy as np
import pytest

from drive_planner.environment.models import TerminalState
from drive_planner.environment.simulator import DrivingSimulator
from drive_planner.utils.errors import ValidationError


def _drive(sim, command=(0.0, 0.0), limit=1000):
    results = []
    while len(results) < limit:
        result = sim.advance(*command)
        results.append(result)
        if result.done:
            break
    return results


class TestReset:
    def test_starts_on_first_waypoint(self, small_settings, straight_scenario):
        sim = small_settings.build(straight_scenario)
        obs, info = sim.reset(seed=0)
        assert (sim.state.x, sim.state.y, sim.state.heading) == (0.0, 0.0, 0.0)
        assert 0.0 <= sim.state.speed <= 8.0
        assert obs.planes.shape == (4, 4, 24, 24)
        assert info["terminal"] is TerminalState.NONE
        assert info["scenario_id"] == "straight"

    def test_observation_space(self, small_settings, straight_scenario):
        sim = small_settings.build(straight_scenario)
        assert sim.observation_space["planes"].shape == (16, 24, 24)
        assert sim.action_space.high.tolist() == [2.0, 0.2]

    def test_seeded(self, small_settings, junction_scenario):
        a = small_settings.build(junction_scenario)
        b = small_settings.build(junction_scenario)
        obs_a, _ = a.reset(seed=11)
        obs_b, _ = b.reset(seed=11)
        assert a.path.lane_ids == b.path.lane_ids
        assert a.state.speed == b.state.speed
        np.testing.assert_array_equal(obs_a.planes, obs_b.planes)

    def test_options(self, small_settings, straight_scenario, straight_path):
        sim = small_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 2.5})
        assert sim.path is straight_path
        assert sim.state.speed == 2.5

    def test_invalid_speed_range(self, straight_scenario):
        with pytest.raises(ValidationError):
            DrivingSimulator(straight_scenario, initial_speed_range=(5.0, 1.0))


class TestAdvance:
    def test_requires_reset(self, small_settings, straight_scenario):
        sim = small_settings.build(straight_scenario)
        with pytest.raises(ValidationError):
            sim.advance(0.0, 0.0)

    def test_goal_on_perfect_drive(
        self, small_settings, straight_scenario, straight_path
    ):
        sim = small_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 6.0})
        results = _drive(sim)
        assert results[-1].terminal is TerminalState.GOAL_REACHED
        assert sum(r.rewards.r_acc for r in results) == 1.0
        assert sum(r.rewards.r_sa for r in results) == 1.0
        assert all(r.rewards.as_tuple() == (0.0, 0.0) for r in results[:-1])
        with pytest.raises(ValidationError):
            sim.advance(0.0, 0.0)

    def test_time_over_when_standing(
        self, small_settings, straight_scenario, straight_path
    ):
        sim = small_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 0.0})
        results = _drive(sim)
        assert results[-1].terminal is TerminalState.TIME_OVER
        assert results[-1].elapsed == pytest.approx(40.1)
        assert len(results) == 401
        assert sum(r.rewards.r_acc for r in results) == pytest.approx(-1.0)

    def test_off_road(self, small_settings, straight_scenario, straight_path):
        sim = small_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 6.0})
        results = _drive(sim, command=(0.0, 0.2))
        assert results[-1].terminal is TerminalState.OFF_ROAD
        assert results[-1].rewards.r_sa < -0.9

    def test_commands_clamped_and_recorded(
        self, small_settings, straight_scenario, straight_path
    ):
        sim = small_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 3.0})
        result = sim.advance(9.0, -1.0)
        assert (result.state.last_cmd_acc, result.state.last_cmd_steer) == (2.0, -0.2)
        assert result.state.speed == pytest.approx(3.2)
        assert result.observation.scalars[4] == 2.0

    def test_indecision_uses_commands(
        self, low_pass_settings, straight_scenario, straight_path
    ):
        sim = low_pass_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 6.0})
        result = sim.advance(1.0, 0.0)
        assert result.state.actual_acc == pytest.approx(0.3)
        # commanded jump of 1.0 exceeds delta_acc by 0.5; realized change is 0.3
        assert result.rewards.r_acc == pytest.approx(-0.1 * 0.5, abs=1e-3)

    def test_low_pass_realized_steer(
        self, low_pass_settings, straight_scenario, straight_path
    ):
        sim = low_pass_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 6.0})
        assert sim.advance(0.0, 0.2).state.actual_steer == pytest.approx(0.06)


class TestGymnasiumStep:
    def test_step_signature(self, small_settings, straight_scenario, straight_path):
        sim = small_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 5.0})
        obs, reward, terminated, truncated, info = sim.step(np.array([0.0, 0.0]))
        assert obs is sim.observation
        assert reward == pytest.approx(info["rewards"].r_acc + info["rewards"].r_sa)
        assert (terminated, truncated) == (False, False)
        assert 0.0 < info["progress"] < 1.0

    def test_time_over_is_truncation(
        self, small_settings, straight_scenario, straight_path
    ):
        sim = small_settings.build(straight_scenario)
        sim.reset(seed=0, options={"path": straight_path, "initial_speed": 0.0})
        terminated = truncated = False
        while not (terminated or truncated):
            _, _, terminated, truncated, _ = sim.step((0.0, 0.0))
        assert truncated and not terminated
