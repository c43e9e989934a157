"""
Data models for the map environment.

Geometry-bearing types are frozen dataclasses over numpy arrays; settings are
pydantic models so they validate when loaded from run configs.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

import numpy as np
from matplotlib.path import Path as PolygonPath
from pydantic import BaseModel, ConfigDict, Field, model_validator

SPEED_LIMIT_MIN = 4.0
SPEED_LIMIT_MAX = 8.3

CHANNELS = ("obstacles", "navigable", "path", "stop_line")
N_SCALARS = 5
SCALAR_NAMES = (
    "target_speed",
    "current_speed",
    "speed_ratio",
    "last_curvature",
    "last_acceleration",
)

# Waypoint columns
WP_X, WP_Y, WP_HEADING, WP_S, WP_SPEED_LIMIT, WP_WIDTH = range(6)


class TerminalState(str, Enum):
    """Episode outcome; NONE while the episode is running."""

    GOAL_REACHED = "GoalReached"
    OFF_ROAD = "OffRoad"
    TIME_OVER = "TimeOver"
    NONE = "None"

    @property
    def is_terminal(self) -> bool:
        return self is not TerminalState.NONE


class RenderConfig(BaseModel):
    """Observation raster settings."""

    model_config = ConfigDict(frozen=True)

    grid_size: int = Field(default=84, ge=8)
    window_m: float = Field(default=50.0, gt=0.0)
    anchor_col: int = Field(default=42, ge=0)
    anchor_row: int = Field(default=63, ge=0)
    n_frames: int = Field(default=4, ge=1)
    ego_length: float = Field(default=4.5, gt=0.0)
    ego_width: float = Field(default=1.8, gt=0.0)

    @model_validator(mode="after")
    def _anchor_inside(self) -> "RenderConfig":
        if self.anchor_col >= self.grid_size or self.anchor_row >= self.grid_size:
            raise ValueError("anchor cell must lie inside the grid")
        return self

    @property
    def resolution(self) -> float:
        """Meters per cell."""
        return self.window_m / self.grid_size


class TerminalConfig(BaseModel):
    """Terminal-state thresholds."""

    goal_radius: float = Field(default=2.0, gt=0.0)
    offroad_margin: float = Field(default=1.0, ge=0.0)
    max_heading_error: float = Field(default=math.pi / 2, gt=0.0, le=math.pi)
    time_limit_speed: float = Field(default=2.0, gt=0.0)


class PathConfig(BaseModel):
    """Path sampling settings."""

    spacing: float = Field(default=0.5, gt=0.0)
    min_path_length: float = Field(default=50.0, gt=0.0)


@dataclass(frozen=True, eq=False)
class Lane:
    """One lane: centerline polyline (N, 2) with its width and speed limit."""

    lane_id: str
    centerline: np.ndarray
    width: float
    speed_limit: float

    @property
    def length(self) -> float:
        return float(np.sum(np.hypot(*np.diff(self.centerline, axis=0).T)))


@dataclass(frozen=True, eq=False)
class Scenario:
    """Immutable scenario; safe to share between workers."""

    scenario_id: str
    lanes: Tuple[Lane, ...]
    navigable: Tuple[np.ndarray, ...]
    stop_lines: Tuple[np.ndarray, ...]
    connectivity: Dict[str, Tuple[str, ...]]
    _polygons: Tuple[PolygonPath, ...] = field(default=(), repr=False, compare=False)
    _bboxes: np.ndarray = field(
        default_factory=lambda: np.zeros((0, 4)), repr=False, compare=False
    )

    def __post_init__(self):
        polygons = tuple(PolygonPath(np.asarray(p)) for p in self.navigable)
        bboxes = np.array(
            [
                (p[:, 0].min(), p[:, 1].min(), p[:, 0].max(), p[:, 1].max())
                for p in self.navigable
            ]
        ).reshape(-1, 4)
        object.__setattr__(self, "_polygons", polygons)
        object.__setattr__(self, "_bboxes", bboxes)

    def lane(self, lane_id: str) -> Lane:
        for lane in self.lanes:
            if lane.lane_id == lane_id:
                return lane
        raise KeyError(lane_id)

    @property
    def lane_ids(self) -> Tuple[str, ...]:
        return tuple(lane.lane_id for lane in self.lanes)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points (N, 2) inside the navigable polygon set."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        inside = np.zeros(len(points), dtype=bool)
        if len(points) == 0:
            return inside
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        for polygon, (x0, y0, x1, y1) in zip(self._polygons, self._bboxes):
            if x1 < lo[0] or x0 > hi[0] or y1 < lo[1] or y0 > hi[1]:
                continue
            candidates = (
                ~inside
                & (points[:, 0] >= x0)
                & (points[:, 0] <= x1)
                & (points[:, 1] >= y0)
                & (points[:, 1] <= y1)
            )
            if not candidates.any():
                continue
            idx = np.nonzero(candidates)[0]
            inside[idx] = polygon.contains_points(points[idx])
        return inside


@dataclass(frozen=True, eq=False)
class Path:
    """Resampled route: waypoints (M, 6) = x, y, heading, s, speed_limit, width."""

    waypoints: np.ndarray
    lane_ids: Tuple[str, ...]
    spacing: float

    @property
    def xy(self) -> np.ndarray:
        return self.waypoints[:, WP_X : WP_Y + 1]

    @property
    def headings(self) -> np.ndarray:
        return self.waypoints[:, WP_HEADING]

    @property
    def arclength(self) -> np.ndarray:
        return self.waypoints[:, WP_S]

    @property
    def speed_limits(self) -> np.ndarray:
        return self.waypoints[:, WP_SPEED_LIMIT]

    @property
    def widths(self) -> np.ndarray:
        return self.waypoints[:, WP_WIDTH]

    @property
    def total_length(self) -> float:
        return float(self.waypoints[-1, WP_S])

    @property
    def goal(self) -> np.ndarray:
        return self.waypoints[-1]

    def __len__(self) -> int:
        return len(self.waypoints)


@dataclass(frozen=True, eq=False)
class LocalizationResult:
    """Projection of a pose onto a path."""

    d: float
    h_err: float
    s: float
    index: int


@dataclass(frozen=True, eq=False)
class Observation:
    """
    Agent-centric observation.

    ``planes`` is uint8 (channels, frames, H, W) with frames ordered oldest to
    newest; ``scalars`` follows SCALAR_NAMES.
    """

    planes: np.ndarray
    scalars: np.ndarray

    @property
    def n_frames(self) -> int:
        return int(self.planes.shape[1])

    def channel(self, name: str) -> np.ndarray:
        return self.planes[CHANNELS.index(name)]

    def frame(self, index: int) -> np.ndarray:
        """All channels of one frame, (channels, H, W)."""
        return self.planes[:, index]

    def history(self) -> Tuple[np.ndarray, ...]:
        """Frames to carry into the next render (all but the oldest)."""
        return tuple(self.planes[:, k] for k in range(1, self.n_frames))

    def stacked(self) -> np.ndarray:
        """Network input planes as float64 (channels * frames, H, W)."""
        c, f, h, w = self.planes.shape
        return self.planes.reshape(c * f, h, w).astype(np.float64)

    @property
    def target_speed(self) -> float:
        return float(self.scalars[0])

    @property
    def current_speed(self) -> float:
        return float(self.scalars[1])

    @property
    def speed_ratio(self) -> float:
        return float(self.scalars[2])
