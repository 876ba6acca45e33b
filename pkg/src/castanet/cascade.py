"""Cascade sample selection, head fusion and cross-model ensembling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ValidationError
from .records import CascadeConfig, ScoreSequence


@dataclass(frozen=True)
class HeadScores:
    """Scores of ``N`` cascade heads over one shared candidate grid."""

    per_head: tuple[ScoreSequence, ...]

    def __post_init__(self):
        heads = tuple(self.per_head)
        if not heads:
            raise ConfigurationError("at least one head required")
        first = heads[0]
        for n, h in enumerate(heads[1:], 2):
            if h.video_id != first.video_id:
                raise ValidationError(f"head {n} is for video {h.video_id!r}", first.video_id,
                                      "video_id")
            if h.timestamps != first.timestamps:
                raise ValidationError(f"head {n} timestamps differ from head 1", first.video_id,
                                      "timestamps")
        object.__setattr__(self, "per_head", heads)

    @property
    def video_id(self) -> str:
        return self.per_head[0].video_id

    @property
    def num_heads(self) -> int:
        return len(self.per_head)

    def as_array(self) -> np.ndarray:
        return np.asarray([h.scores for h in self.per_head], dtype=float)


def cascade_masks(head_scores, taus) -> list[np.ndarray]:
    """Training masks from raw score arrays.

    ``mask[0]`` is all true; ``mask[n] = mask[n-1] & (S[n-1] >= tau[n-1])``.
    ``head_scores`` needs at least ``len(taus)`` rows; extra rows are ignored.
    """
    taus = list(taus)
    s = np.asarray(head_scores, dtype=float)
    if s.ndim != 2 or s.shape[0] < len(taus):
        raise ConfigurationError(f"{len(taus)} mask thresholds need as many score rows")
    masks = [np.ones(s.shape[1], dtype=bool)]
    for n, tau in enumerate(taus):
        masks.append(masks[-1] & (s[n] >= tau))
    return masks


def cascade_selection(heads: HeadScores, cfg: CascadeConfig) -> list[np.ndarray]:
    """Per-head boolean masks marking the samples that enter that head's training loss."""
    if heads.num_heads != cfg.num_heads:
        raise ConfigurationError(
            f"{heads.num_heads} heads but the cascade config describes {cfg.num_heads}"
        )
    if heads.num_heads < 2:
        raise ConfigurationError("cascade selection needs at least two heads")
    return cascade_masks(heads.as_array(), cfg.mask_thresholds)


def _ordered_mean(rows: Sequence[np.ndarray]) -> np.ndarray:
    # left-to-right accumulation so results do not depend on numpy's pairwise summation
    total = np.array(rows[0], dtype=float, copy=True)
    for r in rows[1:]:
        total = total + r
    return total / len(rows)


def fuse_heads(heads: HeadScores) -> ScoreSequence:
    """Element-wise mean of all head scores (every head scores every candidate)."""
    rows = [h.scores_array() for h in heads.per_head]
    fused = np.clip(_ordered_mean(rows), 0.0, 1.0)
    first = heads.per_head[0]
    return ScoreSequence(first.video_id, first.timestamps, tuple(fused.tolist()))


def resample(seq: ScoreSequence, grid) -> np.ndarray:
    """Linear interpolation of ``seq`` onto ``grid``; constant beyond either end."""
    if len(seq) == 0:
        raise ConfigurationError(f"model sequence for {seq.video_id!r} is empty")
    return np.interp(np.asarray(grid, dtype=float), seq.times_array(), seq.scores_array())


def ensemble(models: Sequence[ScoreSequence], grid=None) -> ScoreSequence:
    """Average several models' score curves for one video on a common grid.

    ``grid`` defaults to the first model's timestamps.
    """
    models = list(models)
    if not models:
        raise ConfigurationError("ensemble needs at least one model")
    vid = models[0].video_id
    for m in models[1:]:
        if m.video_id != vid:
            raise ValidationError(f"model for {m.video_id!r} mixed into ensemble", vid, "video_id")
    grid = models[0].timestamps if grid is None else tuple(float(t) for t in grid)
    g = np.asarray(grid, dtype=float)
    if np.any(np.diff(g) <= 0):
        raise ValidationError("grid not strictly increasing", vid, "grid")
    fused = np.clip(_ordered_mean([resample(m, g) for m in models]), 0.0, 1.0)
    return ScoreSequence(vid, tuple(g.tolist()), tuple(fused.tolist()))
