"""Command-line interface for the drive planner."""

from drive_planner.cli.main import cli, main, run

__all__ = ["cli", "main", "run"]
