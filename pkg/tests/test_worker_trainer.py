"""Tests for worker episodes and the D-A3C training loop."""

import json

import numpy as np
import pytest

from drive_planner.policy.checkpoint import load_checkpoint
from drive_planner.policy.params import init_params
from drive_planner.training.models import (
    CURVE_HEADER,
    CurveRow,
    TrainConfig,
    TrainCurves,
)
from drive_planner.training.store import GlobalStore
from drive_planner.training.trainer import network_architecture, train
from drive_planner.training.worker import run_worker_episode
from drive_planner.utils.errors import CheckpointError, MissingPrerequisiteError


@pytest.fixture
def arch(small_train_config, small_settings):
    return network_architecture(small_train_config, small_settings)


def _fresh_store(arch):
    return GlobalStore(init_params(arch, np.random.default_rng(7)))


def _episode(worker_id, episode, arch, config, settings, scenario):
    store = _fresh_store(arch)
    sims = settings.build_all([scenario])
    return run_worker_episode(worker_id, sims, store, config, episode), store


class TestWorkerEpisode:
    def test_reads_once_and_leaves_store_alone(
        self, arch, small_train_config, small_settings, straight_scenario
    ):
        store = _fresh_store(arch)
        before = store.params.flat().copy()
        sims = small_settings.build_all([straight_scenario])
        result = run_worker_episode(0, sims, store, small_train_config, 0)

        assert [(r.version, r.episode) for r in store.read_log] == [(0, 0)]
        assert store.version == 0
        assert store.update_log == []
        np.testing.assert_array_equal(store.params.flat(), before)
        assert result.base_version == 0
        assert result.stats.steps >= 1
        assert result.grads is not None
        assert result.grads.architecture == arch
        assert result.grads.is_finite()

    def test_deterministic(
        self, arch, small_train_config, small_settings, straight_scenario
    ):
        a, _ = _episode(
            0, 1, arch, small_train_config, small_settings, straight_scenario
        )
        b, _ = _episode(
            0, 1, arch, small_train_config, small_settings, straight_scenario
        )
        assert a.stats == b.stats
        np.testing.assert_array_equal(a.grads.flat(), b.grads.flat())

    def test_independent_of_worker(
        self, arch, small_train_config, small_settings, straight_scenario
    ):
        a, _ = _episode(
            0, 3, arch, small_train_config, small_settings, straight_scenario
        )
        b, _ = _episode(
            1, 3, arch, small_train_config, small_settings, straight_scenario
        )
        assert a.stats.model_dump(exclude={"worker_id"}) == b.stats.model_dump(
            exclude={"worker_id"}
        )
        np.testing.assert_array_equal(a.grads.flat(), b.grads.flat())

    def test_needs_a_simulator(self, arch, small_train_config):
        with pytest.raises(ValueError):
            run_worker_episode(0, [], _fresh_store(arch), small_train_config, 0)


class TestLearningRate:
    def test_annealed(self):
        config = TrainConfig(learning_rate=1e-3, max_episodes=100)
        assert config.learning_rate_at(0) == pytest.approx(1e-3)
        assert config.learning_rate_at(50) == pytest.approx(5e-4)
        assert config.learning_rate_at(100) == 0.0
        assert config.learning_rate_at(150) == 0.0

    def test_constant(self):
        config = TrainConfig(learning_rate=1e-3, max_episodes=100, anneal_lr=False)
        assert config.learning_rate_at(99) == 1e-3


class TestTrain:
    def test_no_episodes_writes_outputs(
        self, tmp_path, small_train_config, small_settings, straight_scenario
    ):
        config = small_train_config.model_copy(update={"max_episodes": 0})
        result = train(
            "pure_rl",
            [straight_scenario],
            config,
            small_settings,
            out_dir=tmp_path,
        )
        assert result.curves.rows == []
        assert result.episodes == []
        lines = (tmp_path / "curves.csv").read_text(encoding="utf-8").splitlines()
        assert lines == [",".join(CURVE_HEADER)]
        assert (tmp_path / "checkpoints" / "final.dppf").exists()
        metadata = json.loads((tmp_path / "run_metadata.json").read_text())
        assert metadata["episodes_run"] == 0
        assert metadata["seed"] == 3
        assert metadata["scenarios"] == ["straight"]

    def test_il_then_rl_needs_prerequisites(
        self, small_train_config, small_settings, straight_scenario
    ):
        with pytest.raises(MissingPrerequisiteError):
            train("il_then_rl", [straight_scenario], small_train_config, small_settings)

    def test_il_then_rl_from_initial_params(
        self, arch, small_train_config, small_settings, straight_scenario
    ):
        params = init_params(arch, np.random.default_rng(11))
        config = small_train_config.model_copy(update={"max_episodes": 0})
        result = train(
            "il_then_rl",
            [straight_scenario],
            config,
            small_settings,
            initial_params=params,
        )
        np.testing.assert_array_equal(result.params.flat(), params.flat())

    def test_sequential_rounds(
        self, tmp_path, small_train_config, small_settings, straight_scenario
    ):
        seen = []
        result = train(
            "pure_rl",
            [straight_scenario],
            small_train_config,
            small_settings,
            out_dir=tmp_path,
            on_episode=lambda stats: seen.append(stats.episode),
        )
        assert result.discarded == 0
        assert seen == [0, 1, 2, 3]
        store = result.store
        assert [r.version for r in store.read_log] == [0, 0, 2, 2]
        assert [r.base_version for r in store.update_log] == [0, 0, 2, 2]
        assert [r.version for r in store.update_log] == [1, 2, 3, 4]
        assert [r.worker_id for r in store.update_log] == [0, 1, 0, 1]

        assert [row.episode for row in result.curves.rows] == [2, 4]
        assert [row.version for row in result.curves.rows] == [2, 4]
        first = result.episodes[:2]
        assert result.curves.rows[0].avg_r_acc == pytest.approx(
            np.mean([e.sum_r_acc for e in first])
        )

        names = sorted(p.name for p in (tmp_path / "checkpoints").iterdir())
        assert names == ["final.dppf", "policy_ep000002.dppf", "policy_ep000004.dppf"]
        final = load_checkpoint(tmp_path / "checkpoints" / "final.dppf")
        assert final.metadata["version"] == 4
        assert final.metadata["next_episode"] == 4

    def test_deterministic(self, small_train_config, small_settings, straight_scenario):
        a = train("pure_rl", [straight_scenario], small_train_config, small_settings)
        b = train("pure_rl", [straight_scenario], small_train_config, small_settings)
        np.testing.assert_array_equal(a.params.flat(), b.params.flat())
        assert a.curves == b.curves

    @pytest.mark.slow
    def test_resume_matches_uninterrupted_run(
        self, tmp_path, small_train_config, small_settings, straight_scenario
    ):
        full = train(
            "pure_rl",
            [straight_scenario],
            small_train_config,
            small_settings,
            out_dir=tmp_path / "full",
        )
        resumed = train(
            "pure_rl",
            [straight_scenario],
            small_train_config,
            small_settings,
            out_dir=tmp_path / "resumed",
            resume_from=tmp_path / "full" / "checkpoints" / "policy_ep000002.dppf",
        )
        assert [e.episode for e in resumed.episodes] == [2, 3]
        assert resumed.store.version == full.store.version
        np.testing.assert_array_equal(resumed.params.flat(), full.params.flat())
        assert resumed.curves.rows == full.curves.rows

    def test_resume_rejects_other_seed(
        self, tmp_path, small_train_config, small_settings, straight_scenario
    ):
        config = small_train_config.model_copy(update={"max_episodes": 0})
        train("pure_rl", [straight_scenario], config, small_settings, out_dir=tmp_path)
        other = config.model_copy(update={"seed": 4})
        with pytest.raises(CheckpointError, match="seed"):
            train(
                "pure_rl",
                [straight_scenario],
                other,
                small_settings,
                resume_from=tmp_path / "checkpoints" / "final.dppf",
            )

    def test_threaded_scheduler(
        self, small_train_config, small_settings, straight_scenario
    ):
        config = small_train_config.model_copy(update={"scheduler": "threaded"})
        result = train("pure_rl", [straight_scenario], config, small_settings)
        assert len(result.store.read_log) == 4
        assert result.store.version == 4 - result.discarded
        assert sorted(e.episode for e in result.episodes) == [0, 1, 2, 3]

    @pytest.mark.slow
    def test_threaded_version_trace(
        self, small_train_config, small_settings, junction_scenario, straight_scenario
    ):
        config = small_train_config.model_copy(
            update={"scheduler": "threaded", "n_workers": 4, "max_episodes": 24}
        )
        result = train(
            "pure_rl", [straight_scenario, junction_scenario], config, small_settings
        )
        store = result.store
        versions = [r.version for r in store.update_log]
        assert versions == list(range(1, len(versions) + 1))
        assert all(r.base_version < r.version for r in store.update_log)
        assert store.version == len(versions) == 24 - result.discarded
        assert len(store.read_log) == 24
        assert all(r.version <= store.version for r in store.read_log)
        assert sorted(e.episode for e in result.episodes) == list(range(24))


class TestTrainCurves:
    def _curves(self):
        rows = [
            CurveRow(
                episode=e, window_success=s, avg_r_acc=0.0, avg_r_sa=0.0, version=e
            )
            for e, s in ((100, 0.2), (200, 0.9), (300, 0.95))
        ]
        return TrainCurves(window=100, rows=rows)

    def test_first_episode_reaching(self):
        curves = self._curves()
        assert curves.first_episode_reaching(0.9) == 200
        assert curves.first_episode_reaching(0.1) == 100
        assert curves.first_episode_reaching(0.99) is None

    def test_csv_reload(self, tmp_path):
        curves = self._curves()
        path = curves.to_csv(tmp_path / "curves.csv")
        assert TrainCurves.from_csv(path) == curves
