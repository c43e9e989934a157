"""Pure Pursuit lateral control and free-road IDM longitudinal control."""

import math
from typing import Optional, Tuple

import numpy as np

from drive_planner.dynamics.models import ACC_LIMIT, STEER_LIMIT, VehicleState, clamp
from drive_planner.environment.localization import localize
from drive_planner.environment.models import LocalizationResult, Path
from drive_planner.experts.models import ExpertConfig, IdmConfig, PurePursuitConfig
from drive_planner.utils.geometry import to_local


def path_point_at(path: Path, s: float) -> np.ndarray:
    """Interpolated path point at arclength ``s`` (clamped to the path ends)."""
    s = min(max(s, 0.0), path.total_length)
    x = np.interp(s, path.arclength, path.xy[:, 0])
    y = np.interp(s, path.arclength, path.xy[:, 1])
    return np.array([x, y])


def pure_pursuit_steer(
    state: VehicleState,
    path: Path,
    cfg: Optional[PurePursuitConfig] = None,
    loc: Optional[LocalizationResult] = None,
) -> float:
    """
    Steer toward the path point one lookahead beyond the nearest point.

    kappa = 2 sin(alpha) / lookahead with alpha the goal bearing in the vehicle
    frame; steer = atan(kappa * wheelbase), clamped. Past the path end the
    final waypoint is the goal.
    """
    cfg = cfg or PurePursuitConfig()
    if loc is None:
        loc = localize(path, state.x, state.y, state.heading)
    lookahead = cfg.lookahead(state.speed)
    goal = path_point_at(path, loc.s + lookahead)
    local = to_local(goal[None], (state.x, state.y), state.heading)[0]
    alpha = math.atan2(local[1], local[0])
    curvature = 2.0 * math.sin(alpha) / lookahead
    return clamp(math.atan(curvature * cfg.wheelbase), STEER_LIMIT)


def idm_accel(speed: float, v0: float, cfg: Optional[IdmConfig] = None) -> float:
    """a_max * (1 - (speed / v0) ** delta), clamped to the acceleration range."""
    cfg = cfg or IdmConfig()
    if v0 <= 0.0:
        raise ValueError(f"desired speed must be positive, got {v0}")
    return clamp(cfg.a_max * (1.0 - (speed / v0) ** cfg.accel_exponent), ACC_LIMIT)


def desired_speed(path: Path, s: float, speed: float, cfg: IdmConfig) -> float:
    """Lowest speed limit between ``s`` and the preview horizon."""
    horizon = s + cfg.preview_base + cfg.preview_time * speed
    window = (path.arclength >= s - path.spacing) & (path.arclength <= horizon)
    if not window.any():
        return float(path.speed_limits[-1])
    return float(np.min(path.speed_limits[window]))


class ExpertDriver:
    """Pure Pursuit + IDM agent."""

    def __init__(self, config: Optional[ExpertConfig] = None):
        self.config = config or ExpertConfig()

    def act(
        self,
        state: VehicleState,
        path: Path,
        loc: Optional[LocalizationResult] = None,
    ) -> Tuple[float, float]:
        """Expert (acc, steer) command for the current state."""
        if loc is None:
            loc = localize(path, state.x, state.y, state.heading)
        steer = pure_pursuit_steer(state, path, self.config.pure_pursuit, loc)
        v0 = desired_speed(path, loc.s, state.speed, self.config.idm)
        acc = idm_accel(state.speed, v0, self.config.idm)
        return acc, steer
