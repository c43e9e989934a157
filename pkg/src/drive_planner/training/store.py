"""
Global parameter store for delayed asynchronous updates.

Parameter sets are immutable; an update builds a new set and swaps the
reference under the lock, so a snapshot is always one complete version.
"""

import threading
from typing import List, Optional, Tuple

from drive_planner.policy.optim import Optimizer, PlainDescent
from drive_planner.policy.params import Gradients, NetParams
from drive_planner.training.models import ReadRecord, UpdateRecord
from drive_planner.utils.errors import NonFiniteLossError, ShapeMismatchError
from drive_planner.utils.logger import get_logger

logger = get_logger(__name__)


class GlobalStore:
    """Current global parameters, version counter and read/update logs."""

    def __init__(
        self,
        params: NetParams,
        optimizer: Optional[Optimizer] = None,
        version: int = 0,
    ):
        self._params = params
        self._version = version
        self.optimizer = optimizer or PlainDescent(params.architecture)
        self._lock = threading.Lock()
        self.update_log: List[UpdateRecord] = []
        self.read_log: List[ReadRecord] = []

    @property
    def version(self) -> int:
        return self._version

    @property
    def params(self) -> NetParams:
        return self._params

    def snapshot(
        self, episode: int = -1, worker_id: int = -1
    ) -> Tuple[NetParams, int]:
        """Consistent (params, version) pair; recorded in the read log."""
        with self._lock:
            params, version = self._params, self._version
            self.read_log.append(
                ReadRecord(version=version, episode=episode, worker_id=worker_id)
            )
        return params, version

    def apply_update(
        self,
        grads: Gradients,
        lr: float,
        episode: int = -1,
        worker_id: int = -1,
        base_version: Optional[int] = None,
    ) -> int:
        """Descend on ``grads`` with the store's optimizer; returns the new version."""
        if grads.architecture != self._params.architecture:
            raise ShapeMismatchError(
                "gradients do not match the stored parameters",
                details={"worker_id": worker_id, "episode": episode},
            )
        if not grads.is_finite():
            raise NonFiniteLossError(
                "refusing to apply non-finite gradients",
                details={"worker_id": worker_id, "episode": episode},
            )
        with self._lock:
            self._params = self.optimizer.step(self._params, grads, lr)
            self._version += 1
            self.update_log.append(
                UpdateRecord(
                    version=self._version,
                    base_version=(
                        self._version - 1 if base_version is None else base_version
                    ),
                    episode=episode,
                    worker_id=worker_id,
                )
            )
            return self._version


def apply_update(store: GlobalStore, grads: Gradients, lr: float, **kwargs) -> int:
    return store.apply_update(grads, lr, **kwargs)
