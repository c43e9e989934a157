"""Tests for imitation pretraining."""

import pytest
from conftest import SMALL_RENDER

from drive_planner.dynamics.models import VehicleState
from drive_planner.environment.models import TerminalState
from drive_planner.environment.raster import render_observation
from drive_planner.experts.dataset import (
    EpisodeRecord,
    ILDataset,
    generate_il_dataset,
)
from drive_planner.policy.architecture import tiny_architecture
from drive_planner.policy.network import forward
from drive_planner.training.imitation import ILConfig, il_pretrain
from drive_planner.utils.errors import DatasetError, ShapeMismatchError

PLANE_SHAPE = (4, 4, 24, 24)


def _repeated_dataset(scenario, path, copies, target):
    state = VehicleState(x=5.0, y=0.3, heading=0.02, speed=3.0)
    obs = render_observation(scenario, path, state, config=SMALL_RENDER)
    record = EpisodeRecord(
        episode=0,
        scenario_id=scenario.scenario_id,
        seed=0,
        rows=copies,
        terminal=TerminalState.GOAL_REACHED,
    )
    rows = [(obs, target[0], target[1])] * copies
    return ILDataset.from_rows(PLANE_SHAPE, rows, [record]), obs


class TestIlPretrain:
    def test_empty_dataset(self):
        empty = ILDataset.from_rows(PLANE_SHAPE, [], [])
        with pytest.raises(DatasetError, match="empty"):
            il_pretrain(empty, network="small")

    def test_plane_mismatch(self, straight_scenario, straight_path):
        dataset, _ = _repeated_dataset(straight_scenario, straight_path, 2, (0.0, 0.0))
        with pytest.raises(ShapeMismatchError):
            il_pretrain(dataset, architecture=tiny_architecture())

    def test_curve_without_holdout(self, straight_scenario, straight_path):
        dataset, _ = _repeated_dataset(straight_scenario, straight_path, 4, (0.2, 0.0))
        config = ILConfig(epochs=2, batch_size=2, holdout_fraction=0.0)
        result = il_pretrain(dataset, config, network="small")
        assert [e.epoch for e in result.curve] == [1, 2]
        assert result.final.holdout_loss is None
        assert result.params.is_finite()

    def test_memorizes_one_sample(self, straight_scenario, straight_path):
        dataset, obs = _repeated_dataset(
            straight_scenario, straight_path, 8, (0.5, 0.05)
        )
        config = ILConfig(
            epochs=200, batch_size=8, learning_rate=1e-2, holdout_fraction=0.0
        )
        result = il_pretrain(dataset, config, network="small")
        assert result.final.train_loss < 1e-3
        out = forward(result.params, obs)
        assert out.mu_acc == pytest.approx(0.5, abs=0.04)
        assert out.mu_sa == pytest.approx(0.05, abs=0.04)

    @pytest.mark.slow
    def test_expert_straight_lane(self, small_settings, straight_scenario):
        dataset = generate_il_dataset([straight_scenario], 3, small_settings, seed=1)
        config = ILConfig(epochs=3, batch_size=32, holdout_fraction=0.2)
        result = il_pretrain(dataset, config, network="small")
        assert result.final.holdout_rmse_sa < 0.01
        assert len(result.curve) == 3
