"""Full network: dilated stack and attention in parallel, max-pooled, concatenated, classified.

::

    x --dilated stack--> max over time --> v_tem --+
    x --attention------> max over time --> v_att --+--> FC --> softmax

Training minimises the summed two-class cross-entropy; label 1 means
"boundary", i.e. target column 0 of the softmax.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError
from .layers import (
    _batched,
    attention_backward,
    attention_forward,
    dilated_backward,
    dilated_forward,
    log_softmax,
    max_pool_backward,
    max_pool_forward,
    softmax,
)
from .params import NetParams


def forward(params: NetParams, x):
    """Return ``(probs, cache)``; ``probs`` is ``(B, 2)``."""
    xb, _ = _batched(x)
    if xb.shape[-1] != params.dim:
        raise DimensionError(f"network expects {params.dim} channels, input has {xb.shape[-1]}")
    h = xb
    layer_caches = []
    for layer, d in zip(params.layers, params.dilations):
        h, c = dilated_forward(h, layer, d)
        layer_caches.append(c)
    v_tem, pool_tem = max_pool_forward(h)
    a, att_cache = attention_forward(xb, params.attention)
    v_att, pool_att = max_pool_forward(a)
    feats = np.concatenate([v_tem, v_att], axis=1)
    logits = feats @ params.fc_w + params.fc_b
    cache = (layer_caches, pool_tem, att_cache, pool_att, feats, logits)
    return softmax(logits), cache


def boundary_prob(params: NetParams, x, batch_size: int = 512) -> np.ndarray:
    """Boundary probability for each window in ``x`` (B, T, D)."""
    xb, _ = _batched(x)
    out = [forward(params, xb[i:i + batch_size])[0][:, 0] for i in range(0, len(xb), batch_size)]
    return np.concatenate(out) if out else np.empty(0)


def loss_and_grad(params: NetParams, x, labels, weights=None):
    """Summed (optionally weighted) cross-entropy and its exact gradient.

    ``labels`` are 1 for boundary, 0 otherwise; ``weights`` (default ones)
    scale each sample's loss, so a 0/1 weight vector acts as a mask.
    """
    xb, _ = _batched(x)
    labels = np.asarray(labels).reshape(-1)
    if len(labels) != len(xb):
        raise DimensionError(f"{len(xb)} inputs but {len(labels)} labels")
    w = np.ones(len(xb)) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    _, cache = forward(params, xb)
    layer_caches, pool_tem, att_cache, pool_att, feats, logits = cache
    target = np.where(labels > 0, 0, 1)
    rows = np.arange(len(xb))
    loss = -(w * log_softmax(logits)[rows, target]).sum()

    g_logits = softmax(logits)
    g_logits[rows, target] -= 1.0
    g_logits *= w[:, None]

    grads = params.zeros_like()
    grads.fc_w = feats.T @ g_logits
    grads.fc_b = g_logits.sum(axis=0)
    g_feats = g_logits @ params.fc_w.T
    D = params.dim

    g_att_out = max_pool_backward(g_feats[:, D:], pool_att)
    _, grads.attention = attention_backward(g_att_out, att_cache, params.attention)

    g_h = max_pool_backward(g_feats[:, :D], pool_tem)
    for l in reversed(range(params.num_layers)):
        g_h, grads.layers[l] = dilated_backward(g_h, layer_caches[l], params.layers[l])
    return float(loss), grads


def backward(params: NetParams, x, labels, weights=None) -> NetParams:
    """Gradients of the summed cross-entropy with respect to every parameter."""
    return loss_and_grad(params, x, labels, weights)[1]


def loss(params: NetParams, x, labels, weights=None) -> float:
    xb, _ = _batched(x)
    labels = np.asarray(labels).reshape(-1)
    w = np.ones(len(xb)) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    logits = forward(params, xb)[1][5]
    target = np.where(labels > 0, 0, 1)
    return float(-(w * log_softmax(logits)[np.arange(len(xb)), target]).sum())
