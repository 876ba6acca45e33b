"""SGD training of the cascade heads."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..cascade import cascade_masks
from ..errors import ConfigurationError, TrainingError
from ..records import CascadeConfig
from .net import boundary_prob, loss_and_grad
from .params import NetParams, init_params

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lr: float = 1e-2
    momentum: float = 0.9
    weight_decay: float = 5e-4
    epochs: int = 4
    batch_size: int = 32
    seed: int = 0
    dim: int = 8
    num_layers: int = 4
    warm_start: bool = True
    cascade: CascadeConfig = field(
        default_factory=lambda: CascadeConfig((0.5, 0.4, 0.3), (0.4, 0.3), tau_order="any")
    )

    def __post_init__(self):
        if self.lr < 0 or not 0 <= self.momentum < 1 or self.weight_decay < 0:
            raise ConfigurationError("lr, weight_decay must be >= 0 and momentum in [0, 1)")
        if self.epochs < 0 or self.batch_size < 1:
            raise ConfigurationError("epochs must be >= 0 and batch_size >= 1")


class SGD:
    """Momentum SGD with L2 weight decay added to the gradient.

    ``v <- momentum * v + (g + weight_decay * theta)``; ``theta <- theta - lr * v``.
    """

    def __init__(self, params: NetParams, lr, momentum=0.9, weight_decay=0.0):
        self.params = params
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity = params.zeros_like()

    def step(self, grads: NetParams):
        for (_, p), (_, g), (_, v) in zip(self.params.groups(), grads.groups(),
                                          self.velocity.groups()):
            v *= self.momentum
            v += g + self.weight_decay * p
            p -= self.lr * v


def train_head(params: NetParams, x, labels, cfg: TrainConfig, rng, head=0, step0=0):
    """Train one head in place on ``x`` / ``labels``; returns the per-step mean losses."""
    opt = SGD(params, cfg.lr, cfg.momentum, cfg.weight_decay)
    history = []
    n = len(x)
    step = step0
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, grads = loss_and_grad(params, x[idx], labels[idx])
            mean_loss = loss / len(idx)
            if not np.isfinite(mean_loss):
                raise TrainingError(f"head {head + 1} loss is {mean_loss}", step=step)
            grads = grads.map(lambda g: g / len(idx))
            opt.step(grads)
            history.append(mean_loss)
            step += 1
        tail = history[-max(1, n // cfg.batch_size):]
        logger.info("head %d epoch %d mean loss %.4f", head + 1, epoch + 1, float(np.mean(tail)))
    return history


def train_cascade(x, stage_labels, cfg: TrainConfig):
    """Train ``N`` heads sequentially on windows ``x`` (num_samples, 2n, D).

    Head ``n`` trains only on the samples selected by the cascade masks built
    from heads ``1..n-1``. Returns ``(heads, log)``.
    """
    x = np.asarray(x, dtype=float)
    stage_labels = np.asarray(stage_labels)
    N = cfg.cascade.num_heads
    if stage_labels.shape != (N, len(x)):
        raise ConfigurationError(
            f"expected stage labels of shape {(N, len(x))}, got {stage_labels.shape}"
        )
    if len(x) == 0:
        raise ConfigurationError("training set is empty")
    if x.shape[-1] != cfg.dim:
        raise ConfigurationError(f"features have {x.shape[-1]} channels, config says {cfg.dim}")
    seeds = np.random.SeedSequence(cfg.seed).spawn(N)
    heads, scores, log = [], [], []
    step = 0
    for n in range(N):
        rng = np.random.default_rng(seeds[n])
        params = init_params(cfg.dim, cfg.num_layers, rng)
        if cfg.warm_start and heads:
            params = heads[-1].copy()
        params.meta = {"head": n + 1, "u": cfg.cascade.gt_thresholds[n]}
        mask = cascade_masks(np.asarray(scores).reshape(n, len(x)),
                             cfg.cascade.mask_thresholds[:n])[n]
        selected = np.flatnonzero(mask)
        history = []
        if len(selected):
            history = train_head(params, x[selected], stage_labels[n][selected], cfg, rng, n, step)
        step += len(history)
        heads.append(params)
        if n < N - 1:
            scores.append(boundary_prob(params, x))
        log.append({
            "head": n + 1,
            "u": cfg.cascade.gt_thresholds[n],
            "samples": int(len(selected)),
            "positives": int(stage_labels[n][selected].sum()),
            "loss": [float(v) for v in history],
        })
    return heads, log


def smoothed(history, window=20):
    h = np.asarray(history, dtype=float)
    if len(h) < window:
        return h
    return np.convolve(h, np.ones(window) / window, mode="valid")
