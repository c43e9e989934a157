"""Utility functions and helpers."""

from drive_planner.utils.config import Config, get_config
from drive_planner.utils.logger import get_logger

__all__ = ["Config", "get_config", "get_logger"]
