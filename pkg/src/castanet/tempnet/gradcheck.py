"""Central finite-difference check of :func:`castanet.tempnet.net.loss_and_grad`."""

from __future__ import annotations

import numpy as np

from .net import loss, loss_and_grad
from .params import NetParams, init_params


def numerical_grad(params: NetParams, x, labels, eps=1e-5, weights=None) -> NetParams:
    """Central differences ``(L(theta + eps) - L(theta - eps)) / 2 eps``, one entry at a time."""
    grads = params.zeros_like()
    for (_, arr), (_, g) in zip(params.groups(), grads.groups()):
        flat, gflat = arr.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = loss(params, x, labels, weights)
            flat[i] = orig - eps
            down = loss(params, x, labels, weights)
            flat[i] = orig
            gflat[i] = (up - down) / (2 * eps)
    return grads


def relative_errors(params: NetParams, x, labels, eps=1e-5, weights=None) -> dict[str, float]:
    """Max of ``|analytic - numeric| / max(1, |analytic|)`` per parameter group."""
    _, analytic = loss_and_grad(params, x, labels, weights)
    numeric = numerical_grad(params, x, labels, eps, weights)
    out = {}
    for (name, a), (_, n) in zip(analytic.groups(), numeric.groups()):
        out[name] = float(np.max(np.abs(a - n) / np.maximum(1.0, np.abs(a))))
    return out


def random_instance(seed=0, T=12, D=4, batch=3, num_layers=4):
    """Random net, inputs and labels for a gradient check.

    Biases are randomised too so that every parameter receives a gradient.
    """
    rng = np.random.default_rng(seed)
    params = init_params(D, num_layers, rng)
    for name, arr in params.groups():
        if name.endswith("_b") or name == "fc.b":
            arr[...] = rng.normal(0, 0.1, arr.shape)
    x = rng.normal(size=(batch, T, D))
    labels = rng.integers(0, 2, size=batch)
    return params, x, labels
