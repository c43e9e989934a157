"""Pose localization against a path and terminal-state detection."""

import math
from typing import Optional

import numpy as np

from drive_planner.environment.models import (
    LocalizationResult,
    Path,
    TerminalConfig,
    TerminalState,
)
from drive_planner.utils.geometry import wrap_angle


def localize(
    path: Path,
    x: float,
    y: float,
    heading: float,
    s_hint: Optional[float] = None,
    window: float = 15.0,
) -> LocalizationResult:
    """
    Project a pose onto the path polyline.

    ``d`` is positive to the left of the path direction. With ``s_hint`` only
    segments starting within [s_hint - window, s_hint + 2 * window] are
    searched, which keeps self-approaching routes from snapping backwards.
    """
    xy = path.xy
    s = path.arclength
    if len(xy) == 1:
        dx, dy = x - xy[0, 0], y - xy[0, 1]
        h_path = float(path.headings[0])
        d = -math.sin(h_path) * dx + math.cos(h_path) * dy
        h_err = wrap_angle(heading - h_path)
        return LocalizationResult(d=d, h_err=h_err, s=0.0, index=0)

    first, last = 0, len(xy) - 1
    if s_hint is not None:
        first = max(0, int(np.searchsorted(s, s_hint - window, side="right")) - 1)
        last = min(len(xy) - 1, int(np.searchsorted(s, s_hint + 2.0 * window)) + 1)
        if last <= first:
            first, last = 0, len(xy) - 1

    a = xy[first:last]
    b = xy[first + 1 : last + 1]
    ab = b - a
    length_sq = np.sum(ab * ab, axis=1)
    rel = np.array([x, y]) - a
    t = np.clip(np.sum(rel * ab, axis=1) / length_sq, 0.0, 1.0)
    proj = a + t[:, None] * ab
    dist_sq = np.sum((np.array([x, y]) - proj) ** 2, axis=1)
    k = int(np.argmin(dist_sq))

    seg_len = math.sqrt(float(length_sq[k]))
    ux, uy = ab[k] / seg_len
    rx, ry = rel[k]
    d = ux * ry - uy * rx
    h_path = math.atan2(uy, ux)
    index = first + k
    s_proj = float(s[index] + t[k] * seg_len)
    s_proj = min(max(s_proj, 0.0), path.total_length)
    # report the nearer end of the segment as the nearest waypoint
    nearest = index + 1 if t[k] > 0.5 else index
    return LocalizationResult(
        d=float(d), h_err=wrap_angle(heading - h_path), s=s_proj, index=nearest
    )


def time_limit(path: Path, config: TerminalConfig) -> float:
    """Episode time budget in seconds."""
    return path.total_length / config.time_limit_speed


def offroad_threshold(
    path: Path, loc: LocalizationResult, config: TerminalConfig
) -> float:
    return 0.5 * float(path.widths[loc.index]) + config.offroad_margin


def check_terminal(
    loc: LocalizationResult,
    path: Path,
    elapsed: float,
    config: Optional[TerminalConfig] = None,
) -> TerminalState:
    """Terminal state with precedence GoalReached > OffRoad > TimeOver."""
    config = config or TerminalConfig()
    if path.total_length - loc.s <= config.goal_radius:
        return TerminalState.GOAL_REACHED
    if (
        abs(loc.d) > offroad_threshold(path, loc, config)
        or abs(loc.h_err) > config.max_heading_error
    ):
        return TerminalState.OFF_ROAD
    if elapsed > time_limit(path, config):
        return TerminalState.TIME_OVER
    return TerminalState.NONE
