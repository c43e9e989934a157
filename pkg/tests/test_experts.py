"""Tests for the rule-based experts, the IL dataset and the expert baseline."""

import math

import numpy as np
import pytest

from drive_planner.dynamics.bicycle import step_bicycle
from drive_planner.dynamics.models import VehicleState
from drive_planner.environment.localization import localize
from drive_planner.environment.models import TerminalState
from drive_planner.environment.scenario import build_path, load_scenario
from drive_planner.experts.baseline import baseline_reward
from drive_planner.experts.controllers import (
    ExpertDriver,
    desired_speed,
    idm_accel,
    path_point_at,
    pure_pursuit_steer,
)
from drive_planner.experts.dataset import (
    MANIFEST_NAME,
    generate_il_dataset,
    load_il_dataset,
    save_il_dataset,
)
from drive_planner.experts.models import IdmConfig, PurePursuitConfig
from drive_planner.utils.errors import MissingPrerequisiteError, ValidationError

CIRCLE = {
    "id": "circle",
    "lanes": [
        {
            "id": "ring",
            "width": 3.5,
            "speed_limit": 5.0,
            "start": {"x": 0.0, "y": 0.0, "heading": 0.0},
            "geometry": [{"type": "arc", "radius": 20.0, "angle": math.pi / 2}],
        }
    ],
}


class TestIdm:
    def test_from_standstill(self):
        assert idm_accel(0.0, 6.0) == pytest.approx(1.5)

    def test_at_desired_speed(self):
        assert idm_accel(6.0, 6.0) == pytest.approx(0.0)

    def test_above_desired_speed(self):
        assert idm_accel(7.2, 6.0) == pytest.approx(-1.6104)

    def test_clamped(self):
        assert idm_accel(12.0, 6.0) == -2.0

    def test_bad_desired_speed(self):
        with pytest.raises(ValueError):
            idm_accel(1.0, 0.0)

    def test_speed_rises_monotonically(self):
        v0 = 6.0
        state = VehicleState(x=0.0, y=0.0, heading=0.0, speed=0.0)
        speeds = [state.speed]
        for _ in range(400):
            acc = idm_accel(state.speed, v0)
            state = step_bicycle(state.with_actuation(acc, 0.0), 0.1, 2.8)
            speeds.append(state.speed)
        speeds = np.array(speeds)
        assert np.all(np.diff(speeds) >= 0.0)
        assert speeds.max() <= 1.01 * v0
        assert speeds[-1] == pytest.approx(v0, rel=1e-3)

    def test_preview_sees_the_turn(self, junction_scenario):
        path = build_path(junction_scenario, ("approach", "turn_left"), 0.5)
        assert desired_speed(path, 0.0, 0.0, IdmConfig()) == 6.0
        assert desired_speed(path, 20.0, 0.0, IdmConfig()) == 4.5


class TestPurePursuit:
    def test_on_path(self, straight_path):
        state = VehicleState(x=10.0, y=0.0, heading=0.0, speed=4.0)
        assert pure_pursuit_steer(state, straight_path) == pytest.approx(0.0)

    def test_offset(self, straight_path):
        state = VehicleState(x=10.0, y=0.5, heading=0.0, speed=4.0)
        lookahead = PurePursuitConfig().lookahead(4.0)
        assert lookahead == 5.0
        alpha = -math.atan(0.5 / lookahead)
        expected = math.atan(2.0 * math.sin(alpha) / lookahead * 2.8)
        assert pure_pursuit_steer(state, straight_path) == pytest.approx(expected)

    def test_steady_state_on_circle(self):
        path = build_path(load_scenario(CIRCLE), ("ring",), 0.5)
        x, y, heading = path.waypoints[20, :3]
        state = VehicleState(x=float(x), y=float(y), heading=float(heading), speed=4.0)
        steer = pure_pursuit_steer(state, path)
        assert steer == pytest.approx(math.atan(2.8 / 20.0), rel=0.05)

    def test_lateral_offset_decays(self, straight_path):
        cfg = PurePursuitConfig()
        state = VehicleState(x=5.0, y=1.0, heading=0.0, speed=5.0)
        offsets = []
        for _ in range(100):
            steer = pure_pursuit_steer(state, straight_path, cfg)
            state = step_bicycle(state.with_actuation(0.0, steer), 0.1, cfg.wheelbase)
            offsets.append(localize(straight_path, state.x, state.y, state.heading).d)
        assert state.speed == 5.0
        assert abs(offsets[-1]) < 0.1
        assert max(abs(d) for d in offsets) <= 1.0

    def test_clamped(self, straight_path):
        state = VehicleState(x=10.0, y=3.0, heading=0.0, speed=0.0)
        assert pure_pursuit_steer(state, straight_path) == -0.2

    def test_goal_past_path_end(self, straight_path):
        np.testing.assert_allclose(path_point_at(straight_path, 500.0), [80.0, 0.0])


class TestExpertDriver:
    def test_command(self, straight_path):
        state = VehicleState(x=5.0, y=0.0, heading=0.0, speed=0.0)
        acc, steer = ExpertDriver().act(state, straight_path)
        assert acc == pytest.approx(1.5)
        assert steer == pytest.approx(0.0)


class TestDataset:
    @pytest.fixture
    def dataset(self, small_settings, straight_scenario):
        return generate_il_dataset(
            [straight_scenario], 2, small_settings, seed=0
        )

    def test_contents(self, dataset):
        assert dataset.plane_shape == (4, 4, 24, 24)
        assert len(dataset) == sum(e.rows for e in dataset.episodes)
        assert len(dataset.episodes) == 2
        assert all(e.terminal is TerminalState.GOAL_REACHED for e in dataset.episodes)
        assert dataset.target_ranges_ok()
        assert np.all(np.abs(dataset.targets[:, 1]) < 0.01)

    def test_batch_matches_observation(self, dataset):
        planes, scalars = dataset.batch([3])
        obs = dataset.observation(3)
        np.testing.assert_array_equal(planes[0], obs.stacked())
        np.testing.assert_array_equal(scalars[0], obs.scalars)

    def test_save_load(self, tmp_path, dataset):
        save_il_dataset(dataset, tmp_path)
        loaded = load_il_dataset(tmp_path)
        assert loaded.plane_shape == dataset.plane_shape
        np.testing.assert_array_equal(loaded.packed, dataset.packed)
        np.testing.assert_array_equal(loaded.scalars, dataset.scalars)
        np.testing.assert_array_equal(loaded.targets, dataset.targets)
        assert [e.rows for e in loaded.episodes] == [e.rows for e in dataset.episodes]

    def test_identical_bytes(self, tmp_path, dataset):
        save_il_dataset(dataset, tmp_path / "a")
        save_il_dataset(dataset, tmp_path / "b")
        names = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert MANIFEST_NAME in names
        for name in names:
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_jobs_do_not_change_result(
        self, dataset, small_settings, straight_scenario
    ):
        threaded = generate_il_dataset(
            [straight_scenario], 2, small_settings, seed=0, n_jobs=2
        )
        np.testing.assert_array_equal(threaded.packed, dataset.packed)
        np.testing.assert_array_equal(threaded.targets, dataset.targets)

    def test_no_episodes(self, small_settings, straight_scenario):
        with pytest.raises(ValidationError):
            generate_il_dataset([straight_scenario], 0, small_settings)

    def test_missing(self, tmp_path):
        with pytest.raises(MissingPrerequisiteError, match="dataset not found"):
            load_il_dataset(tmp_path / "absent")


class TestBaseline:
    def test_expert_reaches_goal(self, small_settings, junction_scenario):
        result = baseline_reward(
            [junction_scenario], 3, seed=0, settings=small_settings
        )
        assert result.n_episodes == 3
        assert result.goal_rate == 1.0
        assert result.avg_r_acc > 0.0

    def test_deterministic(self, small_settings, straight_scenario):
        a = baseline_reward([straight_scenario], 2, seed=5, settings=small_settings)
        b = baseline_reward([straight_scenario], 2, seed=5, settings=small_settings)
        assert a == b

    def test_no_episodes(self, straight_scenario):
        with pytest.raises(ValidationError):
            baseline_reward([straight_scenario], 0)
