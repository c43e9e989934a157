"""Policy evaluation reports."""

from drive_planner.evaluation.report import (
    EvalConfig,
    EvalReport,
    ScenarioReport,
    evaluate,
)

__all__ = ["EvalConfig", "EvalReport", "ScenarioReport", "evaluate"]
