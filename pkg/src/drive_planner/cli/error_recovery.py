"""
Error recovery utilities for the CLI.

Maps library errors to user-facing messages with recovery actions and to the
exit-code contract: 1 usage or input errors, 2 runtime failures.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from drive_planner.utils.errors import ErrorCode, PlannerError

USER_ERROR_TYPES = (
    "validation",
    "user_input",
    "file_not_found",
    "missing_prerequisite",
)


class ErrorSeverity(Enum):
    """Error severity levels."""

    ERROR = "error"
    FATAL = "fatal"


@dataclass
class RecoverableError:
    """
    Error with suggested recovery actions.

    Attributes:
        error_type: Type of error (e.g., 'validation', 'file_not_found')
        message: User-friendly error message
        recovery_actions: List of suggested actions to resolve the error
        is_fatal: Whether this error is fatal (cannot be recovered)
        severity: Error severity level
        context: Additional context information
    """

    error_type: str
    message: str
    recovery_actions: List[str] = field(default_factory=list)
    is_fatal: bool = False
    severity: ErrorSeverity = ErrorSeverity.ERROR
    context: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        """1 for user errors, 2 for runtime failures."""
        if self.error_type in USER_ERROR_TYPES:
            return 1
        return 2


_ERROR_TYPES: Dict[str, str] = {
    ErrorCode.VALIDATION_ERROR: "validation",
    ErrorCode.SCENARIO_INVALID: "validation",
    ErrorCode.NOT_FOUND: "file_not_found",
    ErrorCode.MISSING_PREREQUISITE: "missing_prerequisite",
    ErrorCode.SHAPE_MISMATCH: "shape_mismatch",
    ErrorCode.NO_ADMISSIBLE_ROUTE: "no_admissible_route",
    ErrorCode.INSUFFICIENT_DATA: "insufficient_data",
    ErrorCode.NON_FINITE_LOSS: "training_diverged",
    ErrorCode.TRAINING_DIVERGED: "training_diverged",
    ErrorCode.CHECKPOINT_MISMATCH: "checkpoint",
    ErrorCode.DATASET_ERROR: "dataset",
}

_RECOVERY_ACTIONS: Dict[str, List[str]] = {
    "validation": [
        "Check the values in the run config against the documented ranges",
        "Run with --help for usage information",
    ],
    "file_not_found": [
        "Check that the path is correct",
        "Relative paths in a config file resolve against the file's directory",
    ],
    "missing_prerequisite": [
        "Generate a dataset with 'drive-planner gen-dataset'",
        "Or pretrain with 'drive-planner pretrain-il' and pass --init-checkpoint",
    ],
    "no_admissible_route": [
        "Lower path.min_path_length or add connected lanes to the scenario",
    ],
    "insufficient_data": [
        "Increase response.log_rows in the run config",
    ],
    "training_diverged": [
        "Lower the learning rate",
        "Enable gradient clipping (train.grad_clip)",
    ],
    "checkpoint": [
        "Use a checkpoint written with the same render grid and network preset",
    ],
    "dataset": [
        "Regenerate the dataset with 'drive-planner gen-dataset'",
    ],
}


def from_planner_error(error: PlannerError) -> RecoverableError:
    """Wrap a library error with recovery actions."""
    error_type = _ERROR_TYPES.get(error.error_code, "internal")
    return RecoverableError(
        error_type=error_type,
        message=error.message,
        recovery_actions=list(_RECOVERY_ACTIONS.get(error_type, [])),
        is_fatal=error_type == "internal",
        severity=(
            ErrorSeverity.FATAL if error_type == "internal" else ErrorSeverity.ERROR
        ),
        context=dict(error.details),
    )


def internal_error(error: Exception, context: Optional[str] = None) -> RecoverableError:
    """Create an internal error with debugging suggestions."""
    message = f"Internal error: {str(error)}"
    if context:
        message += f" (Context: {context})"

    return RecoverableError(
        error_type="internal",
        message=message,
        recovery_actions=[
            "Try running with --verbose for more information",
            "Report this issue if it persists",
        ],
        is_fatal=True,
        severity=ErrorSeverity.FATAL,
        context={"exception": str(error), "context": context},
    )
