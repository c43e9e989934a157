"""Planar geometry helpers shared by the simulator, experts and rasterizer."""

import math
from typing import Tuple

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]; values already in range are returned unchanged."""
    if -math.pi < angle <= math.pi:
        return angle
    wrapped = math.pi - ((math.pi - angle) % TWO_PI)
    # (pi - a) % 2pi may round to 2pi, which lands on -pi
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def to_local(
    points: np.ndarray, origin: Tuple[float, float], heading: float
) -> np.ndarray:
    """Express world points (N, 2) in a frame at ``origin`` rotated by ``heading``.

    Local x points along the heading, local y to its left.
    """
    cos_h = math.cos(heading)
    sin_h = math.sin(heading)
    dx = points[..., 0] - origin[0]
    dy = points[..., 1] - origin[1]
    return np.stack((cos_h * dx + sin_h * dy, -sin_h * dx + cos_h * dy), axis=-1)


def to_world(
    points: np.ndarray, origin: Tuple[float, float], heading: float
) -> np.ndarray:
    """Inverse of :func:`to_local`."""
    cos_h = math.cos(heading)
    sin_h = math.sin(heading)
    lx = points[..., 0]
    ly = points[..., 1]
    return np.stack(
        (origin[0] + cos_h * lx - sin_h * ly, origin[1] + sin_h * lx + cos_h * ly),
        axis=-1,
    )


def segment_lengths(points: np.ndarray) -> np.ndarray:
    """Lengths of the consecutive segments of a polyline (N, 2)."""
    return np.hypot(np.diff(points[:, 0]), np.diff(points[:, 1]))


def densify(points: np.ndarray, max_step: float) -> np.ndarray:
    """Insert points so that no polyline segment is longer than ``max_step``."""
    if len(points) < 2:
        return np.asarray(points, dtype=np.float64)
    pieces = []
    lengths = segment_lengths(points)
    for i, length in enumerate(lengths):
        n = max(1, int(math.ceil(length / max_step)))
        t = np.arange(n, dtype=np.float64) / n
        pieces.append(points[i] + t[:, None] * (points[i + 1] - points[i]))
    pieces.append(points[-1:])
    return np.concatenate(pieces, axis=0)
