"""Tests for run configuration loading and seed propagation."""

from pathlib import Path

import pytest
import yaml
from conftest import REPO_ROOT

from drive_planner.cli.context import CliContext
from drive_planner.cli.run_config import EFFECTIVE_CONFIG_NAME, load_run_config
from drive_planner.utils.config import Config, get_config
from drive_planner.utils.errors import (
    ErrorCode,
    MissingPrerequisiteError,
    ValidationError,
)


def _write(tmp_path, document, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(document), encoding="utf-8")
    return path


class TestLoadRunConfig:
    def test_ambient_defaults(self):
        config = load_run_config()
        assert config.train.n_workers == 1
        assert config.train.scheduler == "sequential"
        assert config.seed == 0
        expected = Path(get_config().output_dir) / "default"
        assert Path(config.output_dir) == expected

    def test_committed_config(self):
        config = load_run_config(REPO_ROOT / "config" / "desk_scale.yaml")
        assert config.seed == 7
        assert config.train.n_workers == 4
        assert all(p.endswith(".json") for p in config.scenario_files)

    def test_seed_reaches_every_stage(self, tmp_path):
        config = load_run_config(_write(tmp_path, {"seed": 5}))
        assert config.train.seed == 5
        assert config.imitation.seed == 5
        assert config.evaluation.seed == 5
        assert config.response.hyper.seed == 5

    def test_flag_overrides(self, tmp_path):
        path = _write(tmp_path, {"seed": 5, "output_dir": "runs/x"})
        config = load_run_config(path, seed=9, output_dir=str(tmp_path / "out"))
        assert config.seed == 9
        assert config.train.seed == 9
        assert config.output_dir == str(tmp_path / "out")

    def test_nested_values_merge(self, tmp_path):
        config = load_run_config(_write(tmp_path, {"train": {"gamma": 0.9}}))
        assert config.train.gamma == 0.9
        assert config.train.n_workers == 1

    def test_lambda_alias(self, tmp_path):
        config = load_run_config(_write(tmp_path, {"rewards": {"lambda": 0.02}}))
        assert config.rewards.lam == 0.02

    def test_scenario_paths_resolve_against_file(self, tmp_path):
        (tmp_path / "conf").mkdir()
        path = _write(tmp_path / "conf", {"scenario_files": ["../maps/a.json"]})
        config = load_run_config(path)
        assert config.scenario_files == [str((tmp_path / "maps" / "a.json").resolve())]

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ValidationError) as excinfo:
            load_run_config(_write(tmp_path, {"trian": {}}))
        assert any("trian" in e for e in excinfo.value.details["errors"])

    def test_out_of_range(self, tmp_path):
        with pytest.raises(ValidationError):
            load_run_config(_write(tmp_path, {"train": {"gamma": 1.5}}))

    def test_speed_range(self, tmp_path):
        document = {"initial_speed_min": 5.0, "initial_speed_max": 1.0}
        with pytest.raises(ValidationError):
            load_run_config(_write(tmp_path, document))

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="mapping"):
            load_run_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingPrerequisiteError) as excinfo:
            load_run_config(tmp_path / "absent.yaml")
        assert excinfo.value.error_code == ErrorCode.NOT_FOUND
        payload = excinfo.value.to_response()
        assert payload.error_code == ErrorCode.NOT_FOUND
        assert payload.details["resource_type"] == "config"


class TestEcho:
    def test_round_trip(self, tmp_path):
        config = load_run_config(_write(tmp_path, {"seed": 3, "train": {"window": 7}}))
        echoed = config.echo(tmp_path / "out")
        assert echoed.name == EFFECTIVE_CONFIG_NAME
        assert "lambda" in yaml.safe_load(echoed.read_text(encoding="utf-8"))["rewards"]
        again = load_run_config(echoed)
        assert again == config


class TestCliOverride:
    def test_valid_override(self):
        ctx = CliContext(seed=5)
        config = ctx.override("train", max_episodes=12)
        assert config.train.max_episodes == 12
        assert ctx.config.train.seed == 5

    @pytest.mark.parametrize(
        "section, values",
        [
            ("train", {"max_episodes": -1}),
            ("evaluation", {"episodes_per_scenario": 0}),
            ("imitation", {"epochs": "many"}),
        ],
    )
    def test_invalid_override_rejected(self, section, values):
        ctx = CliContext()
        before = ctx.config
        with pytest.raises(ValidationError) as info:
            ctx.override(section, **values)
        assert info.value.error_code == ErrorCode.VALIDATION_ERROR
        field = next(iter(values))
        assert any(
            e.startswith(f"{section}.{field}") for e in info.value.details["errors"]
        )
        assert ctx.config is before


class TestPresets:
    def test_every_listed_preset_resolves(self):
        for name in Config.list_presets():
            assert "DEFAULT_WORKERS" in Config.get_preset(name)

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="Unknown preset"):
            Config.get_preset("huge")
