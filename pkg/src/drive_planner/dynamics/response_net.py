"""
deep_response: a three-layer fully connected surrogate of the vehicle's
actuation dynamics, fitted on command/response logs.

Inference runs in numpy inside the simulator; fitting uses torch.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from drive_planner.dynamics.models import ACC_LIMIT, STEER_LIMIT
from drive_planner.dynamics.plant import ResponseLog
from drive_planner.utils.errors import (
    InsufficientDataError,
    ShapeMismatchError,
    TrainingDivergedError,
    ValidationError,
)
from drive_planner.utils.logger import get_logger
from drive_planner.utils.paramfile import read_param_file, write_param_file

logger = get_logger(__name__)

OUTPUT_LIMITS = np.array([ACC_LIMIT, STEER_LIMIT])
BASE_FEATURES = ("cmd_acc", "cmd_steer", "speed", "actual_acc", "actual_steer")
PARAM_KIND = "deep_response"


class ResponseFitHyper(BaseModel):
    """Hyperparameters for fitting the deep_response model."""

    epochs: int = Field(default=150, ge=0)
    batch: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=3e-3, gt=0.0)
    holdout_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    hidden: Tuple[int, int] = (32, 32)
    command_history: int = Field(default=2, ge=0)
    min_rows: int = Field(default=2000, ge=1)
    seed: int = Field(default=0, ge=0)
    # full-batch L-BFGS iterations after the Adam epochs
    refine_iters: int = Field(default=2000, ge=0)


class FitReport(BaseModel):
    """Outcome of a deep_response fit."""

    rows: int
    train_rows: int
    holdout_rows: int
    epochs: int
    train_rmse_acc: float
    train_rmse_steer: float
    holdout_rmse_acc: float
    holdout_rmse_steer: float
    loss_curve: List[float] = Field(default_factory=list)
    refine_iters: int = 0
    refined_loss: Optional[float] = None


@dataclass(frozen=True)
class ResponseNet:
    """
    Weights of the deep_response network.

    Input: (cmd_acc, cmd_steer, speed, actual_acc, actual_steer) followed by
    ``command_history`` previous (cmd_acc, cmd_steer) pairs, most recent first.
    Hidden activations are tanh; the output is tanh scaled onto the action
    ranges, so predictions can never leave them.
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    input_mean: np.ndarray
    input_scale: np.ndarray
    command_history: int = 0

    def __post_init__(self):
        n_in = self.n_inputs
        if self.w1.shape[1] != n_in or self.input_mean.shape != (n_in,):
            raise ShapeMismatchError(
                "first layer does not match the input features",
                details={"expected_inputs": n_in, "w1": list(self.w1.shape)},
            )
        if (
            self.b1.shape != (self.w1.shape[0],)
            or self.w2.shape[1] != self.w1.shape[0]
            or self.b2.shape != (self.w2.shape[0],)
            or self.w3.shape != (2, self.w2.shape[0])
            or self.b3.shape != (2,)
            or self.input_scale.shape != (n_in,)
        ):
            raise ShapeMismatchError("deep_response layer shapes do not chain")

    @property
    def n_inputs(self) -> int:
        return len(BASE_FEATURES) + 2 * self.command_history

    @property
    def hidden(self) -> Tuple[int, int]:
        return int(self.w1.shape[0]), int(self.w2.shape[0])

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Forward pass on (N, n_inputs) or (n_inputs,) features."""
        x = np.asarray(features, dtype=np.float64)
        x = (x - self.input_mean) / self.input_scale
        h1 = np.tanh(x @ self.w1.T + self.b1)
        h2 = np.tanh(h1 @ self.w2.T + self.b2)
        return OUTPUT_LIMITS * np.tanh(h2 @ self.w3.T + self.b3)

    def step(
        self,
        cmd_acc: float,
        cmd_steer: float,
        speed: float,
        actual_acc: float,
        actual_steer: float,
        history: Sequence[Tuple[float, float]] = (),
    ) -> Tuple[float, float]:
        """Predict the next realized (acc, steer) for one tick."""
        features = [cmd_acc, cmd_steer, speed, actual_acc, actual_steer]
        for lag in range(self.command_history):
            past = history[lag] if lag < len(history) else (0.0, 0.0)
            features.extend(past)
        acc, steer = self.predict(np.asarray(features))
        return float(acc), float(steer)

    def arrays(self):
        return {
            "w1": self.w1,
            "b1": self.b1,
            "w2": self.w2,
            "b2": self.b2,
            "w3": self.w3,
            "b3": self.b3,
            "input_mean": self.input_mean,
            "input_scale": self.input_scale,
        }

    def save(self, path: Union[str, Path]) -> Path:
        return write_param_file(
            path,
            PARAM_KIND,
            {"command_history": self.command_history, "hidden": list(self.hidden)},
            self.arrays(),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ResponseNet":
        decoded = read_param_file(path, expected_kind=PARAM_KIND)
        history = int(decoded.descriptor.get("command_history", 0))
        arrays = {k: np.array(v) for k, v in decoded.arrays.items()}
        return cls(**arrays, command_history=history)


def build_features(
    log: ResponseLog, command_history: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Turn a log into (features, next measured) pairs."""
    n = len(log)
    first = command_history
    rows = np.arange(first, n - 1)
    columns = [
        log.cmd_acc[rows],
        log.cmd_steer[rows],
        log.speed[rows],
        log.meas_acc[rows],
        log.meas_steer[rows],
    ]
    for lag in range(1, command_history + 1):
        columns.append(log.cmd_acc[rows - lag])
        columns.append(log.cmd_steer[rows - lag])
    features = np.column_stack(columns)
    targets = np.column_stack((log.meas_acc[rows + 1], log.meas_steer[rows + 1]))
    return features, targets


def _rmse(prediction: np.ndarray, target: np.ndarray) -> Tuple[float, float]:
    err = np.sqrt(np.mean((prediction - target) ** 2, axis=0))
    return float(err[0]), float(err[1])


def _refine_lbfgs(model, loss_of, xt, yt, iterations: int) -> float:
    import torch

    optimizer = torch.optim.LBFGS(
        model.parameters(),
        lr=1.0,
        max_iter=iterations,
        history_size=50,
        tolerance_grad=1e-12,
        tolerance_change=1e-16,
        line_search_fn="strong_wolfe",
    )

    def closure():
        optimizer.zero_grad()
        loss = loss_of(model(xt), yt)
        loss.backward()
        return loss

    model.train()
    optimizer.step(closure)
    with torch.no_grad():
        return float(loss_of(model(xt), yt).item())


def train_deep_response(
    log: ResponseLog, hyper: ResponseFitHyper | None = None
) -> Tuple[ResponseNet, FitReport]:
    """
    Fit the deep_response model by mean-squared-error regression.

    Minibatch Adam with cosine annealing, then ``refine_iters`` iterations of
    full-batch L-BFGS (strong Wolfe line search) on the training rows. The
    holdout set is the trailing ``holdout_fraction`` of the log (time-ordered
    split). Raises on insufficient data, zero epochs or divergence.
    """
    import torch
    from torch import nn

    hyper = hyper or ResponseFitHyper()
    if hyper.epochs == 0:
        raise ValidationError("no training performed", details={"epochs": 0})
    if len(log) < hyper.min_rows:
        raise InsufficientDataError(
            "insufficient data",
            details={"rows": len(log), "min_rows": hyper.min_rows},
        )

    features, targets = build_features(log, hyper.command_history)
    n_holdout = max(1, int(round(len(features) * hyper.holdout_fraction)))
    n_train = len(features) - n_holdout
    if n_train < hyper.batch:
        raise InsufficientDataError(
            "insufficient data", details={"train_rows": n_train, "batch": hyper.batch}
        )

    x_train, y_train = features[:n_train], targets[:n_train]
    x_hold, y_hold = features[n_train:], targets[n_train:]
    mean = x_train.mean(axis=0)
    scale = np.maximum(x_train.std(axis=0), 1e-6)

    torch.manual_seed(hyper.seed)
    generator = torch.Generator().manual_seed(hyper.seed)
    h1, h2 = hyper.hidden
    limits = torch.tensor(OUTPUT_LIMITS, dtype=torch.float64)

    class _Surrogate(nn.Module):
        def __init__(self):
            super().__init__()
            self.fc1 = nn.Linear(features.shape[1], h1)
            self.fc2 = nn.Linear(h1, h2)
            self.fc3 = nn.Linear(h2, 2)

        def forward(self, x):
            z = torch.tanh(self.fc1(x))
            z = torch.tanh(self.fc2(z))
            return limits * torch.tanh(self.fc3(z))

    model = _Surrogate().double()
    optimizer = torch.optim.Adam(model.parameters(), lr=hyper.learning_rate)
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(
        optimizer, T_max=hyper.epochs
    )
    loss_fn = nn.MSELoss()

    # each channel measured in units of its action range
    root_weights = torch.tensor(1.0 / OUTPUT_LIMITS, dtype=torch.float64)

    def weighted_loss(prediction, target):
        return loss_fn(prediction * root_weights, target * root_weights)

    xt = torch.tensor((x_train - mean) / scale, dtype=torch.float64)
    yt = torch.tensor(y_train, dtype=torch.float64)
    loader = torch.utils.data.DataLoader(
        torch.utils.data.TensorDataset(xt, yt),
        batch_size=hyper.batch,
        shuffle=True,
        generator=generator,
    )

    loss_curve: List[float] = []
    for epoch in range(hyper.epochs):
        model.train()
        total = 0.0
        for xb, yb in loader:
            optimizer.zero_grad()
            prediction = model(xb)
            loss = weighted_loss(prediction, yb)
            if not torch.isfinite(loss):
                raise TrainingDivergedError(
                    "deep_response training diverged",
                    details={"epoch": epoch, "last_losses": loss_curve[-5:]},
                )
            loss.backward()
            optimizer.step()
            total += float(loss.item()) * len(xb)
        scheduler.step()
        loss_curve.append(total / n_train)
        if epoch % 25 == 0 or epoch == hyper.epochs - 1:
            logger.debug(f"deep_response epoch {epoch}: loss={loss_curve[-1]:.3e}")

    refined_loss = None
    if hyper.refine_iters > 0:
        refined_loss = _refine_lbfgs(model, weighted_loss, xt, yt, hyper.refine_iters)
        if not math.isfinite(refined_loss):
            raise TrainingDivergedError(
                "deep_response refinement diverged",
                details={"refine_iters": hyper.refine_iters},
            )
        logger.debug(f"deep_response refined: loss={refined_loss:.3e}")

    net = ResponseNet(
        w1=model.fc1.weight.detach().numpy().copy(),
        b1=model.fc1.bias.detach().numpy().copy(),
        w2=model.fc2.weight.detach().numpy().copy(),
        b2=model.fc2.bias.detach().numpy().copy(),
        w3=model.fc3.weight.detach().numpy().copy(),
        b3=model.fc3.bias.detach().numpy().copy(),
        input_mean=mean,
        input_scale=scale,
        command_history=hyper.command_history,
    )

    train_acc, train_steer = _rmse(net.predict(x_train), y_train)
    hold_acc, hold_steer = _rmse(net.predict(x_hold), y_hold)
    report = FitReport(
        rows=len(log),
        train_rows=n_train,
        holdout_rows=n_holdout,
        epochs=hyper.epochs,
        train_rmse_acc=train_acc,
        train_rmse_steer=train_steer,
        holdout_rmse_acc=hold_acc,
        holdout_rmse_steer=hold_steer,
        loss_curve=loss_curve,
        refine_iters=hyper.refine_iters,
        refined_loss=refined_loss,
    )
    logger.info(
        f"deep_response fitted: holdout RMSE acc={hold_acc:.4f} steer={hold_steer:.4f}"
    )
    return net, report
