"""Imitation pretraining: regress the policy means onto expert commands."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from drive_planner.experts.dataset import ILDataset
from drive_planner.policy.architecture import NetArchitecture, build_architecture
from drive_planner.policy.network import backward_il_batch, il_loss, mu_rmse
from drive_planner.policy.optim import Adam
from drive_planner.policy.params import NetParams, init_params
from drive_planner.utils.errors import (
    DatasetError,
    NonFiniteLossError,
    ShapeMismatchError,
    TrainingDivergedError,
)
from drive_planner.utils.logger import get_logger
from drive_planner.utils.seeding import make_rng

logger = get_logger(__name__)

IL_STREAM = 4


class ILConfig(BaseModel):
    """Imitation pretraining settings."""

    epochs: int = Field(default=30, ge=1)
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    holdout_fraction: float = Field(default=0.1, ge=0.0, lt=1.0)
    eval_batch: int = Field(default=256, ge=1)
    seed: int = Field(default=0, ge=0)


class ILEpoch(BaseModel):
    epoch: int
    train_loss: float
    holdout_loss: Optional[float] = None
    holdout_rmse_acc: Optional[float] = None
    holdout_rmse_sa: Optional[float] = None


@dataclass
class ILResult:
    params: NetParams
    curve: List[ILEpoch]

    @property
    def final(self) -> ILEpoch:
        return self.curve[-1]


def _evaluate(params: NetParams, dataset: ILDataset, rows: np.ndarray, batch: int):
    """Mean loss and per-head RMSE over ``rows``, evaluated in chunks."""
    sq_loss = 0.0
    sq_acc = sq_sa = 0.0
    for start in range(0, len(rows), batch):
        chunk = rows[start : start + batch]
        inputs = dataset.batch(chunk)
        targets = dataset.targets[chunk]
        n = len(chunk)
        sq_loss += il_loss(params, inputs, targets) * n
        rmse_acc, rmse_sa = mu_rmse(params, inputs, targets)
        sq_acc += rmse_acc**2 * n
        sq_sa += rmse_sa**2 * n
    total = len(rows)
    rmse_acc = float(np.sqrt(sq_acc / total))
    rmse_sa = float(np.sqrt(sq_sa / total))
    return sq_loss / total, rmse_acc, rmse_sa


def il_pretrain(
    dataset: ILDataset,
    config: Optional[ILConfig] = None,
    architecture: Optional[NetArchitecture] = None,
    initial_params: Optional[NetParams] = None,
    network: str = "default",
) -> ILResult:
    """
    Minibatch MSE regression of (mu_acc, mu_sa) with Adam.

    A holdout split (``holdout_fraction`` of the rows, at least one row when
    the fraction is positive and the dataset has two or more rows) is scored
    after every epoch.
    """
    config = config or ILConfig()
    if len(dataset) == 0:
        raise DatasetError("IL dataset is empty")
    c, f, h, _ = dataset.plane_shape
    if initial_params is not None:
        architecture = initial_params.architecture
    elif architecture is None:
        architecture = build_architecture(network, h, c * f)
    if architecture.grid_size != h or architecture.in_planes != c * f:
        raise ShapeMismatchError(
            "dataset planes do not match the network input",
            details={"plane_shape": list(dataset.plane_shape)},
        )

    rng = make_rng(config.seed, IL_STREAM)
    params = initial_params or init_params(architecture, rng)
    order = rng.permutation(len(dataset))
    n_holdout = 0
    if config.holdout_fraction > 0.0 and len(dataset) > 1:
        n_holdout = min(
            len(dataset) - 1,
            max(1, int(round(config.holdout_fraction * len(dataset)))),
        )
    holdout, train_rows = order[:n_holdout], order[n_holdout:]

    optimizer = Adam(architecture)
    curve: List[ILEpoch] = []
    for epoch in range(1, config.epochs + 1):
        shuffled = train_rows[rng.permutation(len(train_rows))]
        epoch_loss = 0.0
        for start in range(0, len(shuffled), config.batch_size):
            chunk = shuffled[start : start + config.batch_size]
            try:
                loss, grads = backward_il_batch(
                    params, dataset.batch(chunk), dataset.targets[chunk]
                )
            except NonFiniteLossError as e:
                raise TrainingDivergedError(
                    "imitation pretraining diverged",
                    details={"epoch": epoch, "batch_start": start},
                ) from e
            params = optimizer.step(params, grads, config.learning_rate)
            epoch_loss += loss * len(chunk)
        record = ILEpoch(epoch=epoch, train_loss=epoch_loss / len(shuffled))
        if n_holdout:
            loss, rmse_acc, rmse_sa = _evaluate(
                params, dataset, holdout, config.eval_batch
            )
            record = record.model_copy(
                update={
                    "holdout_loss": loss,
                    "holdout_rmse_acc": rmse_acc,
                    "holdout_rmse_sa": rmse_sa,
                }
            )
        if not params.is_finite():
            raise TrainingDivergedError(
                "imitation pretraining produced non-finite parameters",
                details={"epoch": epoch},
            )
        curve.append(record)
        message = f"IL epoch {epoch}/{config.epochs}: train {record.train_loss:.6f}"
        if record.holdout_loss is not None:
            message += f", holdout {record.holdout_loss:.6f}"
        logger.info(message)
    return ILResult(params, curve)
