"""Rule-based expert settings."""

from pydantic import BaseModel, Field

from drive_planner.dynamics.models import ACC_LIMIT


class PurePursuitConfig(BaseModel):
    """Speed-proportional lookahead, floored at ``min_lookahead``."""

    lookahead_base: float = Field(default=3.0, ge=1.0)
    lookahead_speed_gain: float = Field(default=0.5, ge=0.0)
    min_lookahead: float = Field(default=1.0, ge=1.0)
    wheelbase: float = Field(default=2.8, gt=0.0)

    def lookahead(self, speed: float) -> float:
        distance = self.lookahead_base + self.lookahead_speed_gain * speed
        return max(self.min_lookahead, distance)


class IdmConfig(BaseModel):
    """Free-road Intelligent Driver Model."""

    a_max: float = Field(default=1.5, gt=0.0, le=ACC_LIMIT)
    accel_exponent: float = Field(default=4.0, ge=1.0)
    # The desired speed is the lowest limit within this preview distance
    preview_base: float = Field(default=15.0, ge=0.0)
    preview_time: float = Field(default=1.0, ge=0.0)


class ExpertConfig(BaseModel):
    pure_pursuit: PurePursuitConfig = Field(default_factory=PurePursuitConfig)
    idm: IdmConfig = Field(default_factory=IdmConfig)


class DatasetConfig(BaseModel):
    """Imitation dataset capture."""

    n_episodes: int = Field(default=40, ge=1)
    target_fraction: float = Field(default=0.99, gt=0.0, le=1.0)
    discard_offroad: bool = True
