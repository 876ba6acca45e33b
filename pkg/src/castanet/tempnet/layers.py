"""Forward and backward passes of the network's building blocks.

All functions accept a single feature map ``(T, D)`` or a batch
``(B, T, D)``. Forward functions that feed a backward pass return a cache
tuple alongside their output.
"""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import DimensionError, DomainError
from .params import AttentionParams, DilatedLayerParams, NetParams


def _batched(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        return x[None], True
    if x.ndim == 3:
        return x, False
    raise DimensionError(f"feature map must be (T, D) or (B, T, D), got shape {x.shape}")


def _check_width(x, D, what):
    if x.shape[-1] != D:
        raise DimensionError(f"{what} expects {D} channels, input has {x.shape[-1]}")
    if x.shape[-2] < 1:
        raise DimensionError("feature map needs at least one time step")


def softmax(z, axis=-1):
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(z, axis=-1):
    z = z - z.max(axis=axis, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=axis, keepdims=True))


# dilated residual layer ---------------------------------------------------

def dilated_forward(x, p: DilatedLayerParams, dilation: int):
    xb, _ = _batched(x)
    pre = kernels.dilated_conv_forward(xb, p.conv_w, p.conv_b, dilation)
    hid = np.maximum(pre, 0.0)
    out = xb + hid @ p.proj_w[0] + p.proj_b
    return out, (xb, pre, hid, dilation)


def dilated_backward(grad_out, cache, p: DilatedLayerParams):
    xb, pre, hid, dilation = cache
    g_proj_w = np.einsum("btd,bte->de", hid, grad_out)[None]
    g_proj_b = grad_out.sum(axis=(0, 1))
    g_pre = (grad_out @ p.proj_w[0].T) * (pre > 0)
    gx, g_conv_w, g_conv_b = kernels.dilated_conv_backward(xb, p.conv_w, dilation, g_pre)
    grads = DilatedLayerParams(g_conv_w, g_conv_b, g_proj_w, g_proj_b)
    return grad_out + gx, grads


def dilated_residual_layer(x, p: DilatedLayerParams, dilation: int):
    """``x + proj(ReLU(conv_dilated(x)))`` with zero padding of ``dilation`` at both ends."""
    if dilation < 1:
        raise DomainError(f"dilation must be >= 1, got {dilation}")
    xb, single = _batched(x)
    _check_width(xb, p.dim, "dilated layer")
    out, _ = dilated_forward(xb, p, dilation)
    return out[0] if single else out


def temporal_stack(x, params: NetParams):
    """Dilated residual layers applied in order with dilations 1, 2, 4, ..."""
    xb, single = _batched(x)
    _check_width(xb, params.dim, "temporal stack")
    for layer, d in zip(params.layers, params.dilations):
        xb, _ = dilated_forward(xb, layer, d)
    return xb[0] if single else xb


def receptive_field(num_layers: int, kernel: int = 3) -> int:
    return 1 + (kernel - 1) * (2 ** num_layers - 1)


# attention ------------------------------------------------------------------

def attention_forward(x, p: AttentionParams):
    xb, _ = _batched(x)
    D = xb.shape[-1]
    q, k, v = xb @ p.wq, xb @ p.wk, xb @ p.wv
    attn = softmax(q @ k.transpose(0, 2, 1) / np.sqrt(D))
    h = attn @ v
    return h @ p.wo, (xb, q, k, v, attn, h)


def attention_backward(grad_out, cache, p: AttentionParams):
    xb, q, k, v, attn, h = cache
    scale = 1.0 / np.sqrt(xb.shape[-1])
    g_wo = np.einsum("btd,bte->de", h, grad_out)
    g_h = grad_out @ p.wo.T
    g_attn = g_h @ v.transpose(0, 2, 1)
    g_v = attn.transpose(0, 2, 1) @ g_h
    g_scores = attn * (g_attn - (g_attn * attn).sum(axis=-1, keepdims=True)) * scale
    g_q = g_scores @ k
    g_k = g_scores.transpose(0, 2, 1) @ q
    grads = AttentionParams(
        np.einsum("btd,bte->de", xb, g_q),
        np.einsum("btd,bte->de", xb, g_k),
        np.einsum("btd,bte->de", xb, g_v),
        g_wo,
    )
    gx = g_q @ p.wq.T + g_k @ p.wk.T + g_v @ p.wv.T
    return gx, grads


def attention_weights(x, p: AttentionParams):
    """Row-stochastic ``softmax(Q K^T / sqrt(D))``."""
    xb, single = _batched(x)
    _check_width(xb, p.wq.shape[0], "attention")
    _, cache = attention_forward(xb, p)
    return cache[4][0] if single else cache[4]


def attention_layer(x, p: AttentionParams):
    """Single-head scaled dot-product self-attention followed by an output projection."""
    xb, single = _batched(x)
    _check_width(xb, p.wq.shape[0], "attention")
    out, _ = attention_forward(xb, p)
    return out[0] if single else out


# pooling and head ------------------------------------------------------------

def max_pool_forward(x):
    xb, _ = _batched(x)
    idx = xb.argmax(axis=1)
    return np.take_along_axis(xb, idx[:, None, :], axis=1)[:, 0], (xb.shape, idx)


def max_pool_backward(grad, cache):
    shape, idx = cache
    out = np.zeros(shape)
    np.put_along_axis(out, idx[:, None, :], grad[:, None, :], axis=1)
    return out


def max_pool_time(x):
    """Per-channel maximum over time."""
    xb, single = _batched(x)
    out = xb.max(axis=1)
    return out[0] if single else out


def classify(v_tem, v_att, fc_w, fc_b):
    """``softmax(FC([v_tem, v_att]))``; column 0 is the boundary probability."""
    v_tem = np.asarray(v_tem, dtype=float)
    v_att = np.asarray(v_att, dtype=float)
    fc_w = np.asarray(fc_w, dtype=float)
    if v_tem.shape != v_att.shape:
        raise DimensionError(f"v_tem {v_tem.shape} and v_att {v_att.shape} differ")
    f = np.concatenate([v_tem, v_att], axis=-1)
    if fc_w.shape != (f.shape[-1], 2):
        raise DimensionError(f"FC weights {fc_w.shape} do not accept {f.shape[-1]} features")
    return softmax(f @ fc_w + fc_b)
