"""
Self-describing binary parameter files.

Layout (all integers little-endian):

    magic        4 bytes   b"DPPF"
    version      uint16    FORMAT_VERSION
    header_len   uint32    length of the JSON header in bytes
    header       UTF-8 JSON, keys sorted:
                 {"kind": str, "descriptor": {...}, "metadata": {...},
                  "arrays": [{"name": str, "shape": [int, ...]}, ...]}
    payload      for each entry of "arrays" in order: float64 '<f8', C order

Identical bytes imply identical parameters; writing the same arrays twice
produces identical files.
"""

import json
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np

from drive_planner.utils.errors import CheckpointError, not_found_error

MAGIC = b"DPPF"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sHI")


@dataclass
class ParamFile:
    """Decoded parameter file."""

    kind: str
    descriptor: Dict[str, Any]
    arrays: "OrderedDict[str, np.ndarray]"
    metadata: Dict[str, Any] = field(default_factory=dict)


def write_param_file(
    path: Union[str, Path],
    kind: str,
    descriptor: Mapping[str, Any],
    arrays: Mapping[str, np.ndarray],
    metadata: Mapping[str, Any] | None = None,
) -> Path:
    """Write arrays (in mapping order) with their descriptor to ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    payload = []
    for name, array in arrays.items():
        data = np.ascontiguousarray(array, dtype="<f8")
        entries.append({"name": name, "shape": list(data.shape)})
        payload.append(data.tobytes(order="C"))
    header = json.dumps(
        {
            "kind": kind,
            "descriptor": dict(descriptor),
            "metadata": dict(metadata or {}),
            "arrays": entries,
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with tmp_path.open("wb") as handle:
        handle.write(_PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)))
        handle.write(header)
        for chunk in payload:
            handle.write(chunk)
    tmp_path.replace(path)
    return path


def read_param_file(
    path: Union[str, Path], expected_kind: Optional[str] = None
) -> ParamFile:
    """Read a parameter file, checking magic, version and payload size."""
    path = Path(path)
    if not path.exists():
        raise not_found_error("checkpoint", str(path))
    raw = path.read_bytes()
    if len(raw) < _PREFIX.size:
        raise CheckpointError(f"checkpoint too short: {path}")
    magic, version, header_len = _PREFIX.unpack_from(raw, 0)
    if magic != MAGIC:
        raise CheckpointError(f"not a parameter file (bad magic): {path}")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported parameter file version {version}",
            details={"path": str(path), "supported": FORMAT_VERSION},
        )
    start = _PREFIX.size
    try:
        header = json.loads(raw[start : start + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt checkpoint header: {e}") from e

    kind = header.get("kind", "")
    if expected_kind is not None and kind != expected_kind:
        raise CheckpointError(
            f"checkpoint holds '{kind}' parameters, expected '{expected_kind}'",
            details={"path": str(path)},
        )

    offset = start + header_len
    arrays: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for entry in header.get("arrays", []):
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 8
        if offset + nbytes > len(raw):
            raise CheckpointError(f"truncated checkpoint payload: {path}")
        arrays[entry["name"]] = (
            np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
            .astype(np.float64)
            .reshape(shape)
        )
        offset += nbytes
    if offset != len(raw):
        raise CheckpointError(f"trailing bytes in checkpoint: {path}")

    return ParamFile(
        kind=kind,
        descriptor=header.get("descriptor", {}),
        arrays=arrays,
        metadata=header.get("metadata", {}),
    )
