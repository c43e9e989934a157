"""State shared by every subcommand: global flags and the loaded run config."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from drive_planner.cli.run_config import RunConfig, error_details, load_run_config
from drive_planner.environment.models import Scenario
from drive_planner.environment.scenario import load_scenarios
from drive_planner.utils.errors import ValidationError


@dataclass
class CliContext:
    config_path: Optional[str] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    verbose: bool = False
    _config: Optional[RunConfig] = field(default=None, repr=False)

    @property
    def config(self) -> RunConfig:
        if self._config is None:
            self._config = load_run_config(
                self.config_path, seed=self.seed, output_dir=self.out
            )
        return self._config

    def override(self, section: str, **values: Any) -> RunConfig:
        """Replace fields of one config section (CLI flag overrides), validated."""
        current = getattr(self.config, section)
        try:
            updated = type(current).model_validate({**current.model_dump(), **values})
        except PydanticValidationError as e:
            raise ValidationError(
                f"invalid override for {section}",
                details=error_details(e, prefix=f"{section}."),
            ) from e
        self._config = self.config.model_copy(update={section: updated})
        return self._config

    def output_dir(self, *parts: str) -> Path:
        path = Path(self.config.output_dir, *parts)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def echo_config(self) -> Path:
        return self.config.echo(self.output_dir())

    def training_scenarios(self, files: Sequence[str] = ()) -> List[Scenario]:
        sources = list(files) or self.config.scenario_files
        if not sources:
            raise ValidationError(
                "no scenario files given; "
                "set scenario_files in the config or pass --scenario"
            )
        return load_scenarios(sources)


def set_verbose() -> None:
    """Lower every drive_planner logger and handler to DEBUG."""
    for name, logger in logging.Logger.manager.loggerDict.items():
        if name.startswith("drive_planner") and isinstance(logger, logging.Logger):
            logger.setLevel(logging.DEBUG)
            for handler in logger.handlers:
                handler.setLevel(logging.DEBUG)
