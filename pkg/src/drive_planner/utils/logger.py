"""Logging configuration for Drive-Planner with structured logging support."""

import json
import logging
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Iterator, Optional

from drive_planner.utils.config import get_config

# Context variables for logging
WORKER_ID_CTX: ContextVar[Optional[int]] = ContextVar("worker_id", default=None)
EPISODE_ID_CTX: ContextVar[Optional[int]] = ContextVar("episode_id", default=None)


@contextmanager
def episode_context(worker_id: int, episode_id: int) -> Iterator[None]:
    """Scope the worker/episode ids to a block (restored on exit)."""
    worker_token = WORKER_ID_CTX.set(worker_id)
    episode_token = EPISODE_ID_CTX.set(episode_id)
    try:
        yield
    finally:
        WORKER_ID_CTX.reset(worker_token)
        EPISODE_ID_CTX.reset(episode_token)


class StructuredFormatter(logging.Formatter):
    """JSON structured logging formatter."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as structured JSON."""
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        worker_id = WORKER_ID_CTX.get()
        episode_id = EPISODE_ID_CTX.get()

        if worker_id is not None:
            log_data["worker_id"] = worker_id
        if episode_id is not None:
            log_data["episode_id"] = episode_id

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        # Allow record-specific overrides
        if hasattr(record, "worker_id"):
            log_data["worker_id"] = record.worker_id
        if hasattr(record, "episode_id"):
            log_data["episode_id"] = record.episode_id
        if hasattr(record, "duration_ms"):
            log_data["duration_ms"] = record.duration_ms

        return json.dumps(log_data)


class ContextFormatter(logging.Formatter):
    """Human-readable formatter that appends worker/episode context when set."""

    def format(self, record: logging.LogRecord) -> str:
        message = super().format(record)
        worker_id = WORKER_ID_CTX.get()
        episode_id = EPISODE_ID_CTX.get()
        if worker_id is None and episode_id is None:
            return message
        return f"{message} [worker={worker_id} episode={episode_id}]"


def get_logger(
    name: str, level: Optional[str] = None, structured: bool = False
) -> logging.Logger:
    """
    Get a configured logger instance.

    Args:
        name: Logger name (typically __name__)
        level: Optional log level override
        structured: Use structured JSON logging

    Returns:
        Configured logger instance
    """
    config = get_config()
    log_level = level or config.log_level

    if (config.app_env == "production" or config.structured_logs) and not structured:
        structured = True

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, log_level.upper()))

    # Only add handler if it doesn't already exist
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stdout)
        handler.setLevel(getattr(logging, log_level.upper()))

        if structured:
            formatter: logging.Formatter = StructuredFormatter()
        else:
            formatter = ContextFormatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger
