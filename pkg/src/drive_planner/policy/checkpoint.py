"""Policy checkpoints in the shared parameter-file format."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from drive_planner.policy.architecture import NetArchitecture
from drive_planner.policy.params import NetParams
from drive_planner.utils.errors import CheckpointError
from drive_planner.utils.paramfile import read_param_file, write_param_file

PARAM_KIND = "policy"
OPTIMIZER_PREFIX = "opt."


@dataclass
class PolicyCheckpoint:
    params: NetParams
    optimizer_state: Dict[str, np.ndarray] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)


def save_checkpoint(
    path: Union[str, Path],
    params: NetParams,
    optimizer_state: Optional[Dict[str, np.ndarray]] = None,
    metadata: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Write parameters, then optimizer statistics (``opt.`` prefixed), with the
    architecture as descriptor. Identical inputs give identical bytes.
    """
    arrays: Dict[str, np.ndarray] = dict(params.items())
    for name, array in (optimizer_state or {}).items():
        arrays[f"{OPTIMIZER_PREFIX}{name}"] = array
    return write_param_file(
        path,
        PARAM_KIND,
        params.architecture.model_dump(mode="json"),
        arrays,
        metadata=metadata,
    )


def load_checkpoint(
    path: Union[str, Path], expected: Optional[NetArchitecture] = None
) -> PolicyCheckpoint:
    """Read a checkpoint; raises CheckpointError on architecture mismatch."""
    decoded = read_param_file(path, expected_kind=PARAM_KIND)
    try:
        architecture = NetArchitecture.model_validate(decoded.descriptor)
    except ValueError as e:
        raise CheckpointError(f"invalid architecture descriptor in {path}: {e}") from e
    if expected is not None and architecture != expected:
        raise CheckpointError(
            "checkpoint architecture does not match the configured network",
            details={
                "checkpoint_params": architecture.param_count(),
                "expected_params": expected.param_count(),
            },
        )
    names = [n for n, _ in architecture.shapes()]
    missing = [n for n in names if n not in decoded.arrays]
    if missing:
        raise CheckpointError(f"checkpoint lacks arrays: {missing[:5]}")
    params = NetParams(architecture, {n: decoded.arrays[n] for n in names})
    optimizer_state = {
        k[len(OPTIMIZER_PREFIX):]: v
        for k, v in decoded.arrays.items()
        if k.startswith(OPTIMIZER_PREFIX)
    }
    return PolicyCheckpoint(params, optimizer_state, dict(decoded.metadata))
