"""Batched numpy layers with explicit backward passes (float64)."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


@dataclass
class ConvCache:
    cols: np.ndarray  # (N * Ho * Wo, C * k * k)
    input_shape: Tuple[int, int, int, int]
    out_size: int
    stride: int
    kernel: int


def conv2d_forward(
    x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int
) -> Tuple[np.ndarray, ConvCache]:
    """Valid convolution (cross-correlation). x: (N, C, H, W), w: (F, C, k, k)."""
    n, c, _, _ = x.shape
    f, _, k, _ = w.shape
    windows = sliding_window_view(x, (k, k), axis=(2, 3))[:, :, ::stride, ::stride]
    out_size = windows.shape[2]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(
        n * out_size * out_size, c * k * k
    )
    out = cols @ w.reshape(f, -1).T + b
    out = out.reshape(n, out_size, out_size, f).transpose(0, 3, 1, 2)
    return np.ascontiguousarray(out), ConvCache(cols, x.shape, out_size, stride, k)


def conv2d_backward(
    dout: np.ndarray, w: np.ndarray, cache: ConvCache, need_dx: bool = True
) -> Tuple[Optional[np.ndarray], np.ndarray, np.ndarray]:
    """Gradients (dx, dw, db) of a convolution given dL/dout (N, F, Ho, Wo)."""
    n, c, h, width = cache.input_shape
    f = w.shape[0]
    k, s, o = cache.kernel, cache.stride, cache.out_size
    dout_mat = dout.transpose(0, 2, 3, 1).reshape(-1, f)
    dw = (dout_mat.T @ cache.cols).reshape(w.shape)
    db = dout_mat.sum(axis=0)
    if not need_dx:
        return None, dw, db
    dcols = (dout_mat @ w.reshape(f, -1)).reshape(n, o, o, c, k, k)
    dx = np.zeros((n, c, h, width))
    span = s * (o - 1) + 1
    for i in range(k):
        for j in range(k):
            tap = dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
            dx[:, :, i : i + span : s, j : j + span : s] += tap
    return dx, dw, db


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(dout: np.ndarray, activated: np.ndarray) -> np.ndarray:
    return dout * (activated > 0.0)


def dense_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """x: (N, in), w: (out, in)."""
    return x @ w.T + b


def dense_backward(
    dout: np.ndarray, x: np.ndarray, w: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return dout @ w, dout.T @ x, dout.sum(axis=0)


def softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))
