"""
Run configuration: one YAML document covering every stage of an experiment.

Values come from the file, then from CLI flag overrides; the merged result
is validated before any work starts and echoed as ``effective_config.yaml``.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from drive_planner.dynamics.actuation import ActuationSpec
from drive_planner.dynamics.models import VehicleConfig
from drive_planner.dynamics.plant import PlantConfig
from drive_planner.dynamics.response_net import ResponseFitHyper
from drive_planner.environment.models import PathConfig, RenderConfig, TerminalConfig
from drive_planner.environment.simulator import SimulatorSettings
from drive_planner.evaluation.report import EvalConfig
from drive_planner.experts.models import DatasetConfig, ExpertConfig
from drive_planner.rewards.models import RewardWeights
from drive_planner.training.imitation import ILConfig
from drive_planner.training.models import TrainConfig
from drive_planner.utils.config import get_config
from drive_planner.utils.errors import ValidationError, not_found_error

EFFECTIVE_CONFIG_NAME = "effective_config.yaml"


class ResponseFitConfig(BaseModel):
    """Reference-plant log generation and deep_response fitting."""

    plant: PlantConfig = Field(default_factory=PlantConfig)
    log_rows: int = Field(default=12000, ge=1)
    amplitude_fraction: float = Field(default=0.9, gt=0.0, le=1.0)
    hyper: ResponseFitHyper = Field(default_factory=ResponseFitHyper)
    step_speed: float = Field(default=5.0, ge=0.0)


class RunConfig(BaseModel):
    """Merged settings for every command."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default=0, ge=0)
    output_dir: str = "./runs/default"
    scenario_files: List[str] = Field(default_factory=list)
    eval_scenario_files: List[str] = Field(default_factory=list)

    train: TrainConfig = Field(default_factory=TrainConfig)
    rewards: RewardWeights = Field(default_factory=RewardWeights)
    terminal: TerminalConfig = Field(default_factory=TerminalConfig)
    render: RenderConfig = Field(default_factory=RenderConfig)
    path: PathConfig = Field(default_factory=PathConfig)
    vehicle: VehicleConfig = Field(default_factory=VehicleConfig)
    actuation: ActuationSpec = Field(default_factory=ActuationSpec)
    initial_speed_min: float = Field(default=0.0, ge=0.0)
    initial_speed_max: float = Field(default=8.0, ge=0.0)
    expert: ExpertConfig = Field(default_factory=ExpertConfig)
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    response: ResponseFitConfig = Field(default_factory=ResponseFitConfig)
    imitation: ILConfig = Field(default_factory=ILConfig)
    evaluation: EvalConfig = Field(default_factory=EvalConfig)
    baseline_episodes: int = Field(default=50, ge=1)

    def simulator_settings(
        self, actuation: Optional[ActuationSpec] = None
    ) -> SimulatorSettings:
        return SimulatorSettings(
            weights=self.rewards,
            render=self.render,
            terminal=self.terminal,
            path=self.path,
            vehicle=self.vehicle,
            actuation=actuation or self.actuation,
            initial_speed_min=self.initial_speed_min,
            initial_speed_max=self.initial_speed_max,
        )

    def with_seed(self, seed: int) -> "RunConfig":
        """Propagate one seed to every stage."""
        return self.model_copy(
            update={
                "seed": seed,
                "train": self.train.model_copy(update={"seed": seed}),
                "imitation": self.imitation.model_copy(update={"seed": seed}),
                "evaluation": self.evaluation.model_copy(update={"seed": seed}),
                "response": self.response.model_copy(
                    update={
                        "hyper": self.response.hyper.model_copy(update={"seed": seed})
                    }
                ),
            }
        )

    def to_yaml(self) -> str:
        document = self.model_dump(mode="json", by_alias=True)
        return yaml.safe_dump(document, sort_keys=True)

    def echo(self, directory: Union[str, Path]) -> Path:
        """Write the effective configuration next to the run's outputs."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / EFFECTIVE_CONFIG_NAME
        path.write_text(self.to_yaml(), encoding="utf-8")
        return path


def _ambient_defaults() -> Dict[str, Any]:
    ambient = get_config()
    return {
        "seed": ambient.default_seed,
        "output_dir": str(Path(ambient.output_dir) / "default"),
        "train": {
            "n_workers": ambient.default_workers,
            "scheduler": ambient.default_scheduler,
            "seed": ambient.default_seed,
        },
    }


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def error_details(error: PydanticValidationError, prefix: str = "") -> dict:
    """Flatten pydantic errors into "loc: message" strings."""
    return {
        "errors": [
            f"{prefix}{'.'.join(map(str, err['loc']))}: {err['msg']}"
            for err in error.errors()
        ]
    }


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    output_dir: Optional[str] = None,
) -> RunConfig:
    """
    Build the effective RunConfig.

    Precedence: CLI flags, then the YAML file, then ambient settings
    (``DEFAULT_SEED``, ``DEFAULT_WORKERS``, ``DEFAULT_SCHEDULER``).
    Relative scenario paths in the file resolve against the file's directory.
    """
    document: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise not_found_error("config", str(path))
        try:
            loaded = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as e:
            raise ValidationError(f"invalid YAML in {path}: {e}") from e
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ValidationError(f"config {path} must be a mapping")
        document = loaded
        for key in ("scenario_files", "eval_scenario_files"):
            if key in document:
                document[key] = [
                    str(p if Path(p).is_absolute() else (path.parent / p).resolve())
                    for p in document[key]
                ]

    document = _merge(_ambient_defaults(), document)
    try:
        config = RunConfig.model_validate(document)
    except PydanticValidationError as e:
        raise ValidationError(
            "invalid run configuration", details=error_details(e)
        ) from e

    # the top-level seed drives every stage
    config = config.with_seed(config.seed if seed is None else seed)
    if output_dir is not None:
        config = config.model_copy(update={"output_dir": output_dir})
    if config.initial_speed_min > config.initial_speed_max:
        raise ValidationError("initial_speed_min exceeds initial_speed_max")
    return config
