"""Configuration management for Drive-Planner."""

from typing import Any, Dict, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Ambient configuration loaded from environment variables."""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=False)

    # Application
    app_name: str = Field(default="drive-planner", alias="APP_NAME")
    app_env: str = Field(default="development", alias="APP_ENV")
    debug: bool = Field(default=False, alias="DEBUG")
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")
    structured_logs: bool = Field(default=False, alias="STRUCTURED_LOGS")

    # Storage
    output_dir: str = Field(default="./runs", alias="OUTPUT_DIR")

    # Reproducibility
    default_seed: int = Field(default=0, ge=0, alias="DEFAULT_SEED")

    # Training defaults applied when a run config leaves them unset
    default_workers: int = Field(default=8, ge=1, alias="DEFAULT_WORKERS")
    default_scheduler: str = Field(default="sequential", alias="DEFAULT_SCHEDULER")

    @classmethod
    def get_preset(cls, preset_name: str) -> Dict[str, Any]:
        """
        Get configuration preset values for different use cases.

        Presets:
        - quick_test: Smoke runs (one worker, errors only)
        - testing: Optimized for running the test suite
        - desk_scale: Laptop-sized training runs
        - full_scale: Long runs on a many-core workstation

        Args:
            preset_name: Name of the preset

        Returns:
            Dictionary of configuration values to set as environment variables
        """
        presets = {
            "quick_test": {
                "APP_ENV": "development",
                "LOG_LEVEL": "ERROR",
                "DEFAULT_WORKERS": 1,
                "DEFAULT_SCHEDULER": "sequential",
            },
            "testing": {
                "APP_ENV": "testing",
                "LOG_LEVEL": "WARNING",
                "DEFAULT_WORKERS": 1,
                "DEFAULT_SCHEDULER": "sequential",
                "OUTPUT_DIR": "./runs/test",
            },
            "desk_scale": {
                "APP_ENV": "development",
                "LOG_LEVEL": "INFO",
                "DEFAULT_WORKERS": 4,
                "DEFAULT_SCHEDULER": "sequential",
            },
            "full_scale": {
                "APP_ENV": "production",
                "LOG_LEVEL": "INFO",
                "STRUCTURED_LOGS": True,
                "DEFAULT_WORKERS": 16,
                "DEFAULT_SCHEDULER": "threaded",
            },
        }

        if preset_name not in presets:
            available = ", ".join(presets.keys())
            raise ValueError(
                f"Unknown preset: '{preset_name}'. Available presets: {available}"
            )

        return presets[preset_name]

    @classmethod
    def list_presets(cls) -> Dict[str, str]:
        """List all available configuration presets with descriptions."""
        return {
            "quick_test": "Smoke runs (one worker, errors only)",
            "testing": "Optimized for running the test suite",
            "desk_scale": "Laptop-sized training runs",
            "full_scale": "Long runs on a many-core workstation",
        }


# Global config instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = Config()
    return _config
