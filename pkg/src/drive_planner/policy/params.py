"""
Parameter and gradient trees.

Both are ordered name -> float64 array maps following
:meth:`NetArchitecture.shapes`. A :class:`NetParams` value is never mutated
after construction; updates build a new one.
"""

import math
from typing import Callable, Dict, Iterator, Mapping, Optional, Tuple

import numpy as np

from drive_planner.policy.architecture import HEADS, NetArchitecture
from drive_planner.utils.errors import ShapeMismatchError

SIGMA_MIN = 1e-3
INITIAL_SIGMA = {"acc": 0.5, "sa": 0.05}


class ArrayTree:
    """Ordered collection of named float64 arrays with a fixed architecture."""

    def __init__(self, architecture: NetArchitecture, arrays: Mapping[str, np.ndarray]):
        self.architecture = architecture
        expected = architecture.shapes()
        if [name for name, _ in expected] != list(arrays.keys()):
            missing = sorted(set(n for n, _ in expected) ^ set(arrays.keys()))
            raise ShapeMismatchError(
                "array names do not match the architecture",
                details={"differing": missing[:10]},
            )
        for name, shape in expected:
            if tuple(arrays[name].shape) != shape:
                raise ShapeMismatchError(
                    f"array '{name}' has shape {tuple(arrays[name].shape)}, "
                    f"expected {shape}",
                    details={"name": name},
                )
        self._arrays: Dict[str, np.ndarray] = {
            name: np.asarray(arrays[name], dtype=np.float64) for name, _ in expected
        }

    def __getitem__(self, name: str) -> np.ndarray:
        return self._arrays[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._arrays)

    def __len__(self) -> int:
        return len(self._arrays)

    def items(self):
        return self._arrays.items()

    def names(self) -> Tuple[str, ...]:
        return tuple(self._arrays)

    def head(self, head: str) -> Dict[str, np.ndarray]:
        prefix = f"{head}."
        return {
            k[len(prefix) :]: v
            for k, v in self._arrays.items()
            if k.startswith(prefix)
        }

    def count(self) -> int:
        return int(sum(a.size for a in self._arrays.values()))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self._arrays.values())

    def global_norm(self) -> float:
        return math.sqrt(sum(float(np.sum(a * a)) for a in self._arrays.values()))

    def _check_congruent(self, other: "ArrayTree") -> None:
        if other.architecture != self.architecture:
            raise ShapeMismatchError("trees have different architectures")

    def map(self, fn: Callable[[np.ndarray], np.ndarray]):
        mapped = {k: fn(v) for k, v in self._arrays.items()}
        return type(self)(self.architecture, mapped)

    def zip_map(
        self, other: "ArrayTree", fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ):
        self._check_congruent(other)
        return type(self)(
            self.architecture, {k: fn(v, other[k]) for k, v in self._arrays.items()}
        )

    def copy(self):
        return self.map(np.copy)

    def flat(self) -> np.ndarray:
        """All values concatenated in storage order."""
        return np.concatenate([a.ravel() for a in self._arrays.values()])

    @classmethod
    def zeros(cls, architecture: NetArchitecture):
        return cls(architecture, {n: np.zeros(s) for n, s in architecture.shapes()})


class NetParams(ArrayTree):
    """Weights of both heads."""


class Gradients(ArrayTree):
    """Gradients, shape-congruent with :class:`NetParams`; accumulable with ``+``."""

    def __add__(self, other: "Gradients") -> "Gradients":
        return self.zip_map(other, np.add)

    def scale(self, factor: float) -> "Gradients":
        return self.map(lambda a: a * factor)

    def clip_by_global_norm(self, max_norm: Optional[float]) -> "Gradients":
        if max_norm is None:
            return self
        norm = self.global_norm()
        if norm <= max_norm or norm == 0.0:
            return self
        return self.scale(max_norm / norm)


def _inverse_softplus(y: float) -> float:
    return float(np.log(np.expm1(y)))


def init_params(
    architecture: NetArchitecture, rng: np.random.Generator
) -> NetParams:
    """
    He-normal hidden layers, zero biases, a small output layer and sigma biases
    set so the initial standard deviations are INITIAL_SIGMA.
    """
    arrays: Dict[str, np.ndarray] = {}
    for head in HEADS:
        for name, shape in architecture.head_shapes():
            key = f"{head}.{name}"
            if name.endswith(".b"):
                arrays[key] = np.zeros(shape)
                continue
            fan_in = int(np.prod(shape[1:]))
            std = math.sqrt(2.0 / fan_in)
            if name == "out.w":
                std = 0.01 / math.sqrt(fan_in)
            arrays[key] = rng.normal(0.0, std, size=shape)
        arrays[f"{head}.out.b"][1] = _inverse_softplus(INITIAL_SIGMA[head] - SIGMA_MIN)
    return NetParams(architecture, arrays)


def zero_params(architecture: NetArchitecture) -> NetParams:
    return NetParams.zeros(architecture)
