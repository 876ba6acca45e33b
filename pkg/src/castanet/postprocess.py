"""Boundary extraction from a probability sequence."""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DomainError
from .records import ScoreSequence


def watershed(seq: ScoreSequence, threshold: float = 0.5, inclusive: bool = False) -> tuple[float, ...]:
    """Centres of the maximal runs of candidates scoring above ``threshold``.

    Each run contributes ``(t_first + t_last) / 2``. Membership is strict
    (``score > threshold``) unless ``inclusive`` is set.
    """
    if not 0.0 < threshold < 1.0:
        raise DomainError(f"threshold must lie in (0, 1), got {threshold!r}")
    if len(seq) == 0:
        return ()
    starts, ends = kernels.threshold_runs(seq.scores_array(), threshold, inclusive)
    t = seq.times_array()
    return tuple(((t[starts] + t[ends]) / 2.0).tolist())
