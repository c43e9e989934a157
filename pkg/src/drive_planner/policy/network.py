"""
Two-head Gaussian actor-critic: forward pass, action sampling and the
reinforcement / imitation backward passes.

Each head (acc, sa) is an independent sub-module:
conv -> ReLU (x3) -> flatten ++ scaled scalars -> dense -> ReLU
-> (mu_raw, sigma_raw, value).
mu = range * tanh(mu_raw), sigma = softplus(sigma_raw) + SIGMA_MIN.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from drive_planner.dynamics.models import ACC_LIMIT, STEER_LIMIT, clamp
from drive_planner.environment.models import Observation
from drive_planner.policy.architecture import HEADS
from drive_planner.policy.layers import (
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    relu,
    relu_backward,
    sigmoid,
    softplus,
)
from drive_planner.policy.params import SIGMA_MIN, Gradients, NetParams
from drive_planner.utils.errors import NonFiniteLossError, ShapeMismatchError

HEAD_RANGES = {"acc": ACC_LIMIT, "sa": STEER_LIMIT}
LOG_2PI = math.log(2.0 * math.pi)

NetInput = Union[Observation, Tuple[np.ndarray, np.ndarray]]


class LossCoeffs(BaseModel):
    value_coeff: float = Field(default=0.5, ge=0.0)
    entropy_coeff: float = Field(default=1e-3, ge=0.0)


@dataclass(frozen=True)
class NetOutput:
    mu_acc: float
    sigma_acc: float
    mu_sa: float
    sigma_sa: float
    v_acc: float
    v_sa: float


@dataclass(frozen=True)
class Action:
    """Clamped action plus the raw Gaussian sample its log-probability uses."""

    acc: float
    sa: float
    raw_acc: float
    raw_sa: float

    @classmethod
    def from_raw(cls, raw_acc: float, raw_sa: float) -> "Action":
        return cls(
            clamp(raw_acc, ACC_LIMIT), clamp(raw_sa, STEER_LIMIT), raw_acc, raw_sa
        )


@dataclass
class _HeadCache:
    x: np.ndarray
    conv_caches: list
    activations: list
    z: np.ndarray
    hidden: np.ndarray
    raw: np.ndarray


def _as_batch(
    obs: Union[NetInput, Sequence[NetInput]],
) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(obs, Observation):
        return obs.stacked()[None], obs.scalars[None].astype(np.float64)
    if isinstance(obs, tuple) and len(obs) == 2 and isinstance(obs[0], np.ndarray):
        planes, scalars = obs
        planes = np.asarray(planes, dtype=np.float64)
        scalars = np.asarray(scalars, dtype=np.float64)
        if planes.ndim == 3:
            return planes[None], scalars[None]
        return planes, scalars
    planes_list, scalars_list = zip(*(_as_batch(o) for o in obs))
    return np.concatenate(planes_list), np.concatenate(scalars_list)


def _check_input(params: NetParams, planes: np.ndarray, scalars: np.ndarray) -> None:
    arch = params.architecture
    expected = (arch.in_planes, arch.grid_size, arch.grid_size)
    if planes.shape[1:] != expected or scalars.shape[1:] != (arch.n_scalars,):
        raise ShapeMismatchError(
            f"input planes {planes.shape[1:]} / scalars {scalars.shape[1:]} do not "
            f"match the network ({expected} / {arch.n_scalars})",
        )
    if len(planes) != len(scalars):
        raise ShapeMismatchError("planes and scalars batch sizes differ")


def _head_forward(
    params: NetParams, head: str, planes: np.ndarray, scalars: np.ndarray
) -> Tuple[np.ndarray, _HeadCache]:
    arch = params.architecture
    p = params.head(head)
    x = planes
    caches = []
    activations = []
    for i, spec in enumerate(arch.conv, start=1):
        pre, cache = conv2d_forward(x, p[f"conv{i}.w"], p[f"conv{i}.b"], spec.stride)
        x = relu(pre)
        caches.append(cache)
        activations.append(x)
    flat = x.reshape(len(x), -1)
    z = np.concatenate((flat, scalars * np.asarray(arch.scalar_scale)), axis=1)
    hidden = relu(dense_forward(z, p["fc.w"], p["fc.b"]))
    raw = dense_forward(hidden, p["out.w"], p["out.b"])
    return raw, _HeadCache(planes, caches, activations, z, hidden, raw)


def _head_backward(
    params: NetParams, head: str, draw: np.ndarray, cache: _HeadCache
) -> Dict[str, np.ndarray]:
    """Gradients of one head given dL/draw (N, 3)."""
    arch = params.architecture
    p = params.head(head)
    grads: Dict[str, np.ndarray] = {}
    dhidden, grads["out.w"], grads["out.b"] = dense_backward(
        draw, cache.hidden, p["out.w"]
    )
    dpre = relu_backward(dhidden, cache.hidden)
    dz, grads["fc.w"], grads["fc.b"] = dense_backward(dpre, cache.z, p["fc.w"])
    dx = dz[:, : arch.flat_size].reshape(cache.activations[-1].shape)
    for i in range(len(arch.conv), 0, -1):
        dx = relu_backward(dx, cache.activations[i - 1])
        dx, grads[f"conv{i}.w"], grads[f"conv{i}.b"] = conv2d_backward(
            dx, p[f"conv{i}.w"], cache.conv_caches[i - 1], need_dx=i > 1
        )
    return grads


def _heads(raw: np.ndarray, head: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mu = HEAD_RANGES[head] * np.tanh(raw[:, 0])
    sigma = softplus(raw[:, 1]) + SIGMA_MIN
    return mu, sigma, raw[:, 2]


def forward_batch(params: NetParams, obs) -> Dict[str, np.ndarray]:
    """Batched forward: arrays mu_acc, sigma_acc, v_acc, mu_sa, sigma_sa, v_sa."""
    planes, scalars = _as_batch(obs)
    _check_input(params, planes, scalars)
    out: Dict[str, np.ndarray] = {}
    for head in HEADS:
        raw, _ = _head_forward(params, head, planes, scalars)
        out[f"mu_{head}"], out[f"sigma_{head}"], out[f"v_{head}"] = _heads(raw, head)
    return out


def forward(params: NetParams, obs: NetInput) -> NetOutput:
    """Deterministic forward pass for one observation."""
    out = forward_batch(params, obs)
    if len(out["mu_acc"]) != 1:
        raise ShapeMismatchError("forward() takes a single observation")
    return NetOutput(**{k: float(v[0]) for k, v in out.items()})


def sample_action(
    out: NetOutput, rng: np.random.Generator, greedy: bool = False
) -> Action:
    """Gaussian sample per head (or the means when greedy), clamped to range."""
    if greedy:
        return Action.from_raw(out.mu_acc, out.mu_sa)
    raw_acc = float(rng.normal(out.mu_acc, out.sigma_acc))
    raw_sa = float(rng.normal(out.mu_sa, out.sigma_sa))
    return Action.from_raw(raw_acc, raw_sa)


def gaussian_entropy(sigma):
    """Differential entropy of N(mu, sigma^2)."""
    return 0.5 * (1.0 + LOG_2PI) + np.log(sigma)


def gaussian_log_prob(x, mu, sigma):
    return -0.5 * ((x - mu) / sigma) ** 2 - np.log(sigma) - 0.5 * LOG_2PI


def _to_gradients(
    params: NetParams, per_head: Dict[str, Dict[str, np.ndarray]]
) -> Gradients:
    arrays = {}
    for name, _ in params.architecture.shapes():
        head, key = name.split(".", 1)
        arrays[name] = per_head[head][key]
    return Gradients(params.architecture, arrays)


def backward_rl_batch(
    params: NetParams,
    obs,
    raw_actions: np.ndarray,
    advantages: np.ndarray,
    value_targets: np.ndarray,
    coeffs: LossCoeffs = LossCoeffs(),
) -> Tuple[float, Gradients]:
    """
    Actor-critic loss summed over a batch of steps and both heads.

    Per step and head:
        -log N(a | mu, sigma) * A + c_v * (v - R)^2 - c_e * H(N(mu, sigma))
    ``raw_actions``, ``advantages`` and ``value_targets`` are (N, 2) with
    columns (acc, sa).
    """
    planes, scalars = _as_batch(obs)
    _check_input(params, planes, scalars)
    raw_actions = np.asarray(raw_actions, dtype=np.float64).reshape(-1, 2)
    advantages = np.asarray(advantages, dtype=np.float64).reshape(-1, 2)
    value_targets = np.asarray(value_targets, dtype=np.float64).reshape(-1, 2)

    total = 0.0
    per_head: Dict[str, Dict[str, np.ndarray]] = {}
    for column, head in enumerate(HEADS):
        raw, cache = _head_forward(params, head, planes, scalars)
        mu, sigma, value = _heads(raw, head)
        a = raw_actions[:, column]
        adv = advantages[:, column]
        target = value_targets[:, column]

        log_prob = gaussian_log_prob(a, mu, sigma)
        entropy = gaussian_entropy(sigma)
        loss = (
            -log_prob * adv
            + coeffs.value_coeff * (value - target) ** 2
            - coeffs.entropy_coeff * entropy
        )
        total += float(np.sum(loss))

        diff = a - mu
        dmu = -adv * diff / sigma**2
        dsigma = (
            -adv * (diff**2 / sigma**3 - 1.0 / sigma) - coeffs.entropy_coeff / sigma
        )
        dvalue = 2.0 * coeffs.value_coeff * (value - target)

        draw = np.column_stack(
            (
                dmu * HEAD_RANGES[head] * (1.0 - np.tanh(raw[:, 0]) ** 2),
                dsigma * sigmoid(raw[:, 1]),
                dvalue,
            )
        )
        per_head[head] = _head_backward(params, head, draw, cache)

    if not math.isfinite(total):
        raise NonFiniteLossError(
            "actor-critic loss is not finite",
            details={"batch": len(planes)},
        )
    grads = _to_gradients(params, per_head)
    if not grads.is_finite():
        raise NonFiniteLossError("actor-critic gradients are not finite")
    return total, grads


def backward_rl(
    params: NetParams,
    obs: NetInput,
    action: Action,
    advantage_acc: float,
    advantage_sa: float,
    value_target_acc: float,
    value_target_sa: float,
    coeffs: LossCoeffs = LossCoeffs(),
) -> Tuple[float, Gradients]:
    """Single-step actor-critic loss and gradients."""
    return backward_rl_batch(
        params,
        obs,
        np.array([[action.raw_acc, action.raw_sa]]),
        np.array([[advantage_acc, advantage_sa]]),
        np.array([[value_target_acc, value_target_sa]]),
        coeffs,
    )


def backward_il_batch(
    params: NetParams, obs, targets: np.ndarray
) -> Tuple[float, Gradients]:
    """
    Imitation loss: batch mean of (mu_acc - t_acc)^2 + (mu_sa - t_sa)^2.

    Only the mean paths receive gradient; sigma and value rows stay exactly 0.
    """
    planes, scalars = _as_batch(obs)
    _check_input(params, planes, scalars)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1, 2)
    n = len(planes)

    total = 0.0
    per_head: Dict[str, Dict[str, np.ndarray]] = {}
    for column, head in enumerate(HEADS):
        raw, cache = _head_forward(params, head, planes, scalars)
        mu, _, _ = _heads(raw, head)
        err = mu - targets[:, column]
        total += float(np.sum(err**2)) / n
        draw = np.zeros_like(raw)
        dtanh = 1.0 - np.tanh(raw[:, 0]) ** 2
        draw[:, 0] = (2.0 / n) * err * HEAD_RANGES[head] * dtanh
        per_head[head] = _head_backward(params, head, draw, cache)

    if not math.isfinite(total):
        raise NonFiniteLossError("imitation loss is not finite")
    return total, _to_gradients(params, per_head)


def backward_il(
    params: NetParams, obs: NetInput, target: Tuple[float, float]
) -> Tuple[float, Gradients]:
    """Single-sample imitation loss and gradients."""
    return backward_il_batch(params, obs, np.array([target], dtype=np.float64))


def il_loss(params: NetParams, obs, targets: np.ndarray) -> float:
    """Imitation loss without gradients."""
    out = forward_batch(params, obs)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1, 2)
    err_acc = out["mu_acc"] - targets[:, 0]
    err_sa = out["mu_sa"] - targets[:, 1]
    return float(np.mean(err_acc**2 + err_sa**2))


def mu_rmse(params: NetParams, obs, targets: np.ndarray) -> List[float]:
    """Per-head RMSE of the means against targets."""
    out = forward_batch(params, obs)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1, 2)
    return [
        float(np.sqrt(np.mean((out["mu_acc"] - targets[:, 0]) ** 2))),
        float(np.sqrt(np.mean((out["mu_sa"] - targets[:, 1]) ** 2))),
    ]
