"""Optimizers over :class:`NetParams`; each step returns a new parameter set."""

from typing import Dict, Literal

import numpy as np

from drive_planner.policy.architecture import NetArchitecture
from drive_planner.policy.params import Gradients, NetParams

OptimizerName = Literal["plain", "rmsprop", "adam"]


class Optimizer:
    """Base optimizer; subclasses keep their statistics as named arrays."""

    name = "plain"

    def __init__(self, architecture: NetArchitecture):
        self.architecture = architecture

    def step(self, params: NetParams, grads: Gradients, lr: float) -> NetParams:
        raise NotImplementedError

    def state_arrays(self) -> Dict[str, np.ndarray]:
        return {}

    def load_state(self, arrays: Dict[str, np.ndarray]) -> None:
        """Restore statistics saved by :meth:`state_arrays`."""


class PlainDescent(Optimizer):
    """params <- params - lr * grads."""

    name = "plain"

    def step(self, params, grads, lr):
        return params.zip_map(grads, lambda p, g: p - lr * g)


class RMSProp(Optimizer):
    """RMSProp with one set of squared-gradient statistics shared by all workers."""

    name = "rmsprop"

    def __init__(
        self, architecture: NetArchitecture, decay: float = 0.99, eps: float = 0.1
    ):
        super().__init__(architecture)
        self.decay = decay
        self.eps = eps
        self.mean_sq = {n: np.zeros(s) for n, s in architecture.shapes()}

    def step(self, params, grads, lr):
        new = {}
        for name, p in params.items():
            g = grads[name]
            decayed = self.decay * self.mean_sq[name]
            self.mean_sq[name] = decayed + (1.0 - self.decay) * g * g
            new[name] = p - lr * g / np.sqrt(self.mean_sq[name] + self.eps)
        return NetParams(params.architecture, new)

    def state_arrays(self):
        return {f"ms.{n}": a for n, a in self.mean_sq.items()}

    def load_state(self, arrays):
        for name in self.mean_sq:
            key = f"ms.{name}"
            if key in arrays:
                self.mean_sq[name] = np.array(arrays[key], dtype=np.float64)


class Adam(Optimizer):
    name = "adam"

    def __init__(
        self,
        architecture: NetArchitecture,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        super().__init__(architecture)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {n: np.zeros(s) for n, s in architecture.shapes()}
        self.v = {n: np.zeros(s) for n, s in architecture.shapes()}

    def step(self, params, grads, lr):
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        new = {}
        for name, p in params.items():
            g = grads[name]
            self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * g * g
            m_hat = self.m[name] / correction1
            v_hat = self.v[name] / correction2
            new[name] = p - lr * m_hat / (np.sqrt(v_hat) + self.eps)
        return NetParams(params.architecture, new)

    def state_arrays(self):
        arrays = {"adam.t": np.array([float(self.t)])}
        arrays.update({f"m.{n}": a for n, a in self.m.items()})
        arrays.update({f"v.{n}": a for n, a in self.v.items()})
        return arrays

    def load_state(self, arrays):
        if "adam.t" in arrays:
            self.t = int(arrays["adam.t"][0])
        for name in self.m:
            if f"m.{name}" in arrays:
                self.m[name] = np.array(arrays[f"m.{name}"], dtype=np.float64)
            if f"v.{name}" in arrays:
                self.v[name] = np.array(arrays[f"v.{name}"], dtype=np.float64)


def build_optimizer(name: str, architecture: NetArchitecture) -> Optimizer:
    if name == "plain":
        return PlainDescent(architecture)
    if name == "rmsprop":
        return RMSProp(architecture)
    if name == "adam":
        return Adam(architecture)
    raise ValueError(f"Unknown optimizer: '{name}'. Available: plain, rmsprop, adam")
