"""
Agent-centric rasterization of the scenario into occupancy planes.

Grid convention: the vehicle sits at the center of the anchor cell, local x
(forward) points up (decreasing row), local y (left) points to decreasing
column. A local point (x_f, y_l) lands in
row = floor(anchor_row + 0.5 - x_f / res), col = floor(anchor_col + 0.5 - y_l / res).
"""

import math
from functools import lru_cache
from pathlib import Path as FilePath
from typing import List, Optional, Sequence, Union

import numpy as np

from drive_planner.dynamics.models import VehicleState
from drive_planner.environment.models import (
    CHANNELS,
    N_SCALARS,
    Observation,
    Path,
    RenderConfig,
    Scenario,
)
from drive_planner.utils.errors import DatasetError, ValidationError
from drive_planner.utils.geometry import densify, to_local, to_world

OBSTACLES, NAVIGABLE, PATH, STOP_LINE = range(len(CHANNELS))


@lru_cache(maxsize=8)
def _cell_centers_local(config: RenderConfig) -> np.ndarray:
    """Local (x_f, y_l) of every cell center, (H * W, 2) in row-major order."""
    n = config.grid_size
    res = config.resolution
    rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    x_f = (config.anchor_row - rows) * res
    y_l = (config.anchor_col - cols) * res
    return np.column_stack((x_f.ravel(), y_l.ravel()))


@lru_cache(maxsize=8)
def _ego_mask(config: RenderConfig) -> np.ndarray:
    centers = _cell_centers_local(config)
    inside = (np.abs(centers[:, 0]) <= 0.5 * config.ego_length) & (
        np.abs(centers[:, 1]) <= 0.5 * config.ego_width
    )
    mask = inside.reshape(config.grid_size, config.grid_size).astype(np.uint8)
    mask[config.anchor_row, config.anchor_col] = 1
    return mask


def local_to_cells(local: np.ndarray, config: RenderConfig) -> np.ndarray:
    """Map local points (N, 2) to integer (row, col); out-of-window rows are dropped."""
    res = config.resolution
    rows = np.floor(config.anchor_row + 0.5 - local[:, 0] / res).astype(np.int64)
    cols = np.floor(config.anchor_col + 0.5 - local[:, 1] / res).astype(np.int64)
    n = config.grid_size
    keep = (rows >= 0) & (rows < n) & (cols >= 0) & (cols < n)
    return np.column_stack((rows[keep], cols[keep]))


def _draw_polyline(
    plane: np.ndarray,
    points: np.ndarray,
    origin: np.ndarray,
    heading: float,
    config: RenderConfig,
) -> None:
    if len(points) == 0:
        return
    dense = densify(points, 0.25 * config.resolution)
    cells = local_to_cells(to_local(dense, tuple(origin), heading), config)
    plane[cells[:, 0], cells[:, 1]] = 1


def _window_radius(config: RenderConfig) -> float:
    centers = _cell_centers_local(config)
    return float(np.max(np.hypot(centers[:, 0], centers[:, 1]))) + config.resolution


def _path_in_window(path: Path, origin: np.ndarray, radius: float) -> np.ndarray:
    xy = path.xy
    near = np.hypot(xy[:, 0] - origin[0], xy[:, 1] - origin[1]) <= radius
    if not near.any():
        return xy[:0]
    idx = np.nonzero(near)[0]
    lo = max(0, idx[0] - 1)
    hi = min(len(xy), idx[-1] + 2)
    return xy[lo:hi]


def render_frame(
    scenario: Scenario,
    path: Path,
    state: VehicleState,
    config: RenderConfig,
) -> np.ndarray:
    """One frame of all channels, uint8 (channels, H, W)."""
    n = config.grid_size
    frame = np.zeros((len(CHANNELS), n, n), dtype=np.uint8)
    origin = np.array([state.x, state.y])

    frame[OBSTACLES] = _ego_mask(config)

    world_centers = to_world(_cell_centers_local(config), tuple(origin), state.heading)
    frame[NAVIGABLE] = scenario.contains(world_centers).reshape(n, n)

    radius = _window_radius(config)
    visible = _path_in_window(path, origin, radius)
    _draw_polyline(frame[PATH], visible, origin, state.heading, config)
    for line in scenario.stop_lines:
        _draw_polyline(frame[STOP_LINE], line, origin, state.heading, config)
    return frame


def observation_scalars(
    state: VehicleState, target_speed: float, wheelbase: float
) -> np.ndarray:
    """(target_speed, current_speed, speed_ratio, last curvature, last acceleration)."""
    ratio = state.speed / target_speed if target_speed > 0.0 else 0.0
    curvature = math.tan(state.last_cmd_steer) / wheelbase
    return np.array(
        [target_speed, state.speed, ratio, curvature, state.last_cmd_acc],
        dtype=np.float64,
    )


def render_observation(
    scenario: Scenario,
    path: Path,
    state: VehicleState,
    frame_history: Sequence[np.ndarray] = (),
    target_speed: Optional[float] = None,
    config: Optional[RenderConfig] = None,
    wheelbase: float = 2.8,
) -> Observation:
    """
    Render the newest frame and stack it after ``frame_history`` (oldest first).

    Missing history is filled with copies of the oldest available frame, so at
    episode start every frame equals the initial one. ``target_speed`` defaults
    to the speed limit of the waypoint nearest to the vehicle.
    """
    config = config or RenderConfig()
    pose = (state.x, state.y, state.heading, state.speed)
    if not all(math.isfinite(v) for v in pose):
        raise ValidationError("vehicle pose must be finite")
    if len(frame_history) > config.n_frames - 1:
        raise ValidationError(
            f"frame history holds {len(frame_history)} frames, at most "
            f"{config.n_frames - 1} allowed"
        )

    newest = render_frame(scenario, path, state, config)
    frames: List[np.ndarray] = [np.asarray(f, dtype=np.uint8) for f in frame_history]
    frames.append(newest)
    while len(frames) < config.n_frames:
        frames.insert(0, frames[0])
    planes = np.stack(frames, axis=1)

    if target_speed is None:
        nearest = int(
            np.argmin(np.hypot(path.xy[:, 0] - state.x, path.xy[:, 1] - state.y))
        )
        target_speed = float(path.speed_limits[nearest])
    scalars = observation_scalars(state, target_speed, wheelbase)
    return Observation(planes=planes, scalars=scalars)


def _write_pgm(path: FilePath, plane: np.ndarray) -> None:
    height, width = plane.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    path.write_bytes(header + (plane.astype(np.uint8) * 255).tobytes())


def read_pgm(path: Union[str, FilePath]) -> np.ndarray:
    """Read a binary PGM (P5, maxval 255) into a uint8 array."""
    raw = FilePath(path).read_bytes()
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        start = pos
        while not raw[pos : pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise DatasetError(f"not a binary PGM file: {path}")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise DatasetError(f"unsupported PGM maxval {maxval}: {path}")
    data = np.frombuffer(raw, dtype=np.uint8, count=width * height, offset=pos + 1)
    return data.reshape(height, width).copy()


def dump_observation(
    obs: Observation, directory: Union[str, FilePath], prefix: str = "obs"
) -> List[FilePath]:
    """
    Write one PGM per channel-frame (``{prefix}_{channel}_f{k}.pgm``, cells set
    to 255) plus ``{prefix}_scalars.txt`` holding the scalars on one line.
    """
    directory = FilePath(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for c, name in enumerate(CHANNELS):
        for k in range(obs.n_frames):
            target = directory / f"{prefix}_{name}_f{k}.pgm"
            _write_pgm(target, obs.planes[c, k])
            written.append(target)
    sidecar = directory / f"{prefix}_scalars.txt"
    sidecar.write_text(
        " ".join(f"{v:.17g}" for v in obs.scalars[:N_SCALARS]) + "\n", encoding="utf-8"
    )
    written.append(sidecar)
    return written
