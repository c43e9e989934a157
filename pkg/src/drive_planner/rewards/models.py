"""Reward weights, per-step context and the per-head reward pair."""

from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, field_validator

from drive_planner.environment.models import TerminalState


class RewardWeights(BaseModel):
    """Reward constants; defaults are the reference values."""

    model_config = ConfigDict(populate_by_name=True)

    zeta: float = Field(default=0.009, gt=0.0)
    phi: float = Field(default=0.05, gt=0.0)
    chi: float = Field(default=0.05, gt=0.0)
    psi: float = Field(default=0.1, gt=0.0)
    lam: float = Field(default=0.01, gt=0.0, alias="lambda")
    delta_acc: float = Field(default=0.5, gt=0.0)
    delta_sa: float = Field(default=0.05, gt=0.0)
    # Negates the speed reward above the limit instead of rewarding overspeed
    penalize_overspeed: bool = False


class TransitionContext(BaseModel):
    """Everything one reward evaluation needs."""

    sr: float = Field(ge=0.0)
    h_err: float
    d: float
    delta_acc_step: float = Field(default=0.0, ge=0.0)
    delta_sa_step: float = Field(default=0.0, ge=0.0)
    terminal: TerminalState = TerminalState.NONE

    @field_validator("h_err", "d")
    @classmethod
    def _finite(cls, value: float) -> float:
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("must be finite")
        return value


@dataclass(frozen=True)
class RewardPair:
    """Per-step rewards of the acceleration and steering heads."""

    r_acc: float = 0.0
    r_sa: float = 0.0

    def __add__(self, other: "RewardPair") -> "RewardPair":
        return RewardPair(self.r_acc + other.r_acc, self.r_sa + other.r_sa)

    def as_tuple(self):
        return (self.r_acc, self.r_sa)
