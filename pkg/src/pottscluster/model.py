# pottscluster/model.py
"""GCN encoder with a linear skip path.

Forward pass: H = SeLU(Abar @ (X W) + X W_skip), logits = H W_out,
C = row softmax(logits). The architecture is small and fixed, so the
backward pass is a hand-derived reverse-mode chain rather than a tape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import NormalizedAdjacency, spmm

__all__ = [
    "SELU_LAMBDA",
    "SELU_ALPHA",
    "ModelParams",
    "GradientBundle",
    "ForwardCache",
    "selu",
    "selu_grad",
    "softmax_rows",
    "forward",
    "backward",
]

SELU_LAMBDA = 1.0507009873554805
SELU_ALPHA = 1.6732632423543772


@dataclass
class ModelParams:
    """Encoder weights plus the trainable resolution scalar gamma.

    w, w_skip: (l, h); w_out: (h, k); gamma >= 0 (clamped after updates).
    """

    w: np.ndarray
    w_skip: np.ndarray
    w_out: np.ndarray
    gamma: float


@dataclass
class GradientBundle:
    """Gradients of the training objective, one slot per ModelParams field."""

    d_w: np.ndarray
    d_w_skip: np.ndarray
    d_w_out: np.ndarray
    d_gamma: float


@dataclass
class ForwardCache:
    """Intermediates retained by forward() for the matching backward() call."""

    abar: NormalizedAdjacency
    x_used: np.ndarray
    h_pre: np.ndarray
    h: np.ndarray
    c: np.ndarray
    w_out: np.ndarray


def selu(x):
    """SeLU activation, elementwise: lambda*x for x>0, lambda*alpha*(e^x - 1) otherwise."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0, SELU_LAMBDA * x, SELU_LAMBDA * SELU_ALPHA * np.expm1(np.minimum(x, 0.0)))


def selu_grad(x):
    """Derivative of selu: lambda for x>0, lambda*alpha*e^x for x<=0."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0, SELU_LAMBDA, SELU_LAMBDA * SELU_ALPHA * np.exp(np.minimum(x, 0.0)))


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilized by subtracting each row's maximum."""
    logits = np.asarray(logits, dtype=np.float64)
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(
    abar: NormalizedAdjacency,
    x: np.ndarray,
    params: ModelParams,
    dropout_mask: np.ndarray | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Run the encoder and return (C, cache).

    ``dropout_mask`` is supplied in training mode only; its entries are 0 or
    1/keep_prob (inverted dropout), applied to the input features.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != abar.n:
        raise ValueError(f"features must be ({abar.n}, l), got {x.shape}")
    l, h = params.w.shape
    if x.shape[1] != l or params.w_skip.shape != (l, h) or params.w_out.shape[0] != h:
        raise ValueError(
            f"inconsistent shapes: x {x.shape}, w {params.w.shape}, "
            f"w_skip {params.w_skip.shape}, w_out {params.w_out.shape}"
        )
    x_used = x if dropout_mask is None else x * dropout_mask
    h_pre = spmm(abar, x_used @ params.w) + x_used @ params.w_skip
    h_act = selu(h_pre)
    logits = h_act @ params.w_out
    c = softmax_rows(logits)
    cache = ForwardCache(abar=abar, x_used=x_used, h_pre=h_pre, h=h_act, c=c, w_out=params.w_out)
    return c, cache


def backward(cache: ForwardCache, d_c: np.ndarray, d_gamma: float) -> GradientBundle:
    """Chain upstream gradients (d_c wrt C, d_gamma wrt gamma) back to the weights.

    gamma does not enter the forward pass, so its gradient passes through.
    """
    d_c = np.asarray(d_c, dtype=np.float64)
    if d_c.shape != cache.c.shape:
        raise ValueError(f"upstream gradient shape {d_c.shape} does not match C {cache.c.shape}")
    # softmax rows: d_logits = C * (dC - rowsum(dC * C))
    inner = (d_c * cache.c).sum(axis=1, keepdims=True)
    d_logits = cache.c * (d_c - inner)
    d_w_out = cache.h.T @ d_logits
    d_h = d_logits @ cache.w_out.T
    d_h_pre = d_h * selu_grad(cache.h_pre)
    # h_pre = Abar (X W) + X W_skip with Abar symmetric
    back_prop = spmm(cache.abar, d_h_pre)
    d_w = cache.x_used.T @ back_prop
    d_w_skip = cache.x_used.T @ d_h_pre
    return GradientBundle(d_w=d_w, d_w_skip=d_w_skip, d_w_out=d_w_out, d_gamma=float(d_gamma))
