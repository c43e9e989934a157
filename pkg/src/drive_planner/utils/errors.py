"""
Standardized error handling for Drive-Planner.

Provides error codes and an exception hierarchy with a consistent payload
(code, message, details) shared by the library and the CLI.
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel


class ErrorCode:
    """Standard error codes for Drive-Planner."""

    # Input validation
    VALIDATION_ERROR = "VALIDATION_ERROR"
    SCENARIO_INVALID = "SCENARIO_INVALID"
    SHAPE_MISMATCH = "SHAPE_MISMATCH"

    # Missing inputs
    NOT_FOUND = "NOT_FOUND"
    MISSING_PREREQUISITE = "MISSING_PREREQUISITE"
    NO_ADMISSIBLE_ROUTE = "NO_ADMISSIBLE_ROUTE"
    INSUFFICIENT_DATA = "INSUFFICIENT_DATA"

    # Runtime failures
    NON_FINITE_LOSS = "NON_FINITE_LOSS"
    TRAINING_DIVERGED = "TRAINING_DIVERGED"
    CHECKPOINT_MISMATCH = "CHECKPOINT_MISMATCH"
    DATASET_ERROR = "DATASET_ERROR"
    INTERNAL_ERROR = "INTERNAL_ERROR"


class ErrorResponse(BaseModel):
    """Standard error payload (logged and rendered by the CLI)."""

    error: bool = True
    error_code: str
    message: str
    details: Optional[Dict[str, Any]] = None


class PlannerError(Exception):
    """Base class for every error raised by drive_planner."""

    error_code: str = ErrorCode.INTERNAL_ERROR

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_response(self) -> ErrorResponse:
        """Build the standard error payload."""
        return ErrorResponse(
            error_code=self.error_code,
            message=self.message,
            details=self.details or None,
        )


class ValidationError(PlannerError):
    """A configuration value or input violates its contract."""

    error_code = ErrorCode.VALIDATION_ERROR


class ScenarioError(PlannerError):
    """Scenario document failed to parse or violates a geometric invariant."""

    error_code = ErrorCode.SCENARIO_INVALID


class NoAdmissibleRouteError(PlannerError):
    """No route in the scenario is long enough to sample."""

    error_code = ErrorCode.NO_ADMISSIBLE_ROUTE


class ShapeMismatchError(PlannerError):
    """Array shapes do not match the network architecture."""

    error_code = ErrorCode.SHAPE_MISMATCH


class NonFiniteLossError(PlannerError):
    """A loss or gradient became NaN or infinite."""

    error_code = ErrorCode.NON_FINITE_LOSS


class InsufficientDataError(PlannerError):
    """Not enough rows to train or evaluate."""

    error_code = ErrorCode.INSUFFICIENT_DATA


class TrainingDivergedError(PlannerError):
    """Supervised training produced a non-finite loss."""

    error_code = ErrorCode.TRAINING_DIVERGED


class CheckpointError(PlannerError):
    """Checkpoint file is corrupt or does not match the expected architecture."""

    error_code = ErrorCode.CHECKPOINT_MISMATCH


class MissingPrerequisiteError(PlannerError):
    """A required input artifact (dataset, checkpoint, file) is missing."""

    error_code = ErrorCode.MISSING_PREREQUISITE


class DatasetError(PlannerError):
    """Dataset generation or decoding failed."""

    error_code = ErrorCode.DATASET_ERROR


def not_found_error(resource_type: str, resource_id: Optional[str] = None):
    """Create a not-found error for a missing resource."""
    message = f"{resource_type} not found"
    if resource_id:
        message += f": {resource_id}"
    error = MissingPrerequisiteError(
        message, details={"resource_type": resource_type, "resource_id": resource_id}
    )
    error.error_code = ErrorCode.NOT_FOUND
    return error
