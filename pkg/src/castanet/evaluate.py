"""Rel.Dis.-thresholded precision / recall / F1 over multi-annotator ground truth.

A prediction and a ground-truth boundary may be matched when their Rel.Dis.
is at most ``u``; each boundary is matched at most once and the number of
true positives is the size of a maximum one-to-one matching. On a line with
a symmetric distance threshold the compatibility graph is convex, so the
greedy two-pointer sweep in :func:`match_count` is exact;
:func:`brute_force_tp` is an exhaustive reference for small inputs.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import ConfigurationError, DataError, DomainError
from .labeling import merge_annotators
from .records import PRF, AnnotationSet, EvalReport, VideoMeta, f1_score, threshold_key

EVAL_MODES = ("max-annotator", "union")
DEFAULT_THRESHOLDS = (0.05,)
SWEEP_THRESHOLDS = tuple(round(0.05 * k, 2) for k in range(1, 11))


class MatchCounts(NamedTuple):
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)

    def __add__(self, other):
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def _check_domain(u, norm_len):
    if not 0.0 < u <= 1.0:
        raise DomainError(f"u must lie in (0, 1], got {u!r}")
    if not norm_len > 0:
        raise DomainError(f"norm_len must be > 0, got {norm_len!r}")


def match_count(preds, gts, u: float, norm_len: float) -> MatchCounts:
    """``(tp, fp, fn)`` from a maximum matching of sorted ``preds`` to sorted ``gts``."""
    _check_domain(u, norm_len)
    p = np.sort(np.asarray(preds, dtype=float))
    g = np.sort(np.asarray(gts, dtype=float))
    tp = kernels.match_sweep(p, g, norm_len, u)
    return MatchCounts(tp, len(p) - tp, len(g) - tp)


def brute_force_tp(preds, gts, u: float, norm_len: float) -> int:
    """Maximum matching size by exhaustive search over injective assignments.

    Each prediction is either left unmatched or assigned to an unused
    compatible ground-truth boundary; subproblems are memoised on the set
    of used boundaries. Exponential in ``len(gts)``; meant for <= ~12 items.
    """
    _check_domain(u, norm_len)
    p = [float(x) for x in preds]
    g = [float(x) for x in gts]
    adj = [[j for j, gt in enumerate(g) if abs(pt - gt) / norm_len <= u] for pt in p]

    @lru_cache(maxsize=None)
    def best(i, used):
        if i == len(p):
            return 0
        out = best(i + 1, used)
        for j in adj[i]:
            if not used >> j & 1:
                out = max(out, 1 + best(i + 1, used | 1 << j))
        return out

    return best(0, 0)


def score_video(preds, ann: AnnotationSet, meta: VideoMeta, u: float,
                mode: str = "max-annotator") -> MatchCounts:
    """Counts for one video.

    ``max-annotator`` scores against each annotator separately and keeps the
    one with the best per-video F1 (first annotator wins ties); ``union``
    scores against the half-frame-deduplicated union of all annotators.
    """
    norm_len = meta.duration_sec
    if mode == "union":
        return match_count(preds, merge_annotators(ann, meta.fps), u, norm_len)
    if mode != "max-annotator":
        raise ConfigurationError(f"unknown eval mode {mode!r}; expected one of {EVAL_MODES}")
    best = None
    for lst in ann.annotators:
        c = match_count(preds, lst, u, norm_len)
        if best is None or c.f1 > best.f1:
            best = c
    return best


def _resolve(annotations) -> Mapping[str, tuple[VideoMeta, AnnotationSet]]:
    if isinstance(annotations, Mapping):
        return annotations
    return {m.video_id: (m, a) for m, a in annotations}


def video_counts(item) -> list[MatchCounts]:
    """Counts of one video at every threshold; ``item`` is ``(preds, meta, ann, thresholds, mode)``."""
    preds, meta, ann, thresholds, mode = item
    return [score_video(preds, ann, meta, u, mode) for u in thresholds]


def evaluate(preds: Iterable[tuple[str, Sequence[float]]], annotations,
             thresholds: Sequence[float] = DEFAULT_THRESHOLDS, mode: str = "max-annotator",
             macro: bool = False, per_video: bool = False, map_fn=map) -> EvalReport:
    """Aggregate precision / recall / F1 per Rel.Dis. threshold.

    ``preds`` is a sequence of ``(video_id, boundaries)``; ``annotations`` is
    either a mapping ``video_id -> (meta, ann)`` or a sequence of pairs.
    Micro aggregation (sum counts over videos, then divide) is the default;
    ``macro`` averages per-video precision, recall and F1 instead.
    ``map_fn`` computes the per-video counts (e.g. a process pool's ``map``);
    it must preserve order.
    """
    ann_by_id = _resolve(annotations)
    preds = list(preds)
    thresholds = list(thresholds)
    for vid, _ in preds:
        if vid not in ann_by_id:
            raise DataError(f"no annotations for predicted video {vid!r}")
    items = [(b, ann_by_id[vid][0], ann_by_id[vid][1], thresholds, mode) for vid, b in preds]
    per_video_counts = list(map_fn(video_counts, items))
    table = {}
    details = {} if per_video else None
    for k, u in enumerate(thresholds):
        counts = [vc[k] for vc in per_video_counts]
        key = threshold_key(u)
        if macro:
            if counts:
                p = sum(c.precision for c in counts) / len(counts)
                r = sum(c.recall for c in counts) / len(counts)
                f = sum(c.f1 for c in counts) / len(counts)
                table[key] = PRF(p, r, f)
            else:
                table[key] = PRF(0.0, 0.0, 0.0)
        else:
            total = MatchCounts(0, 0, 0)
            for c in counts:
                total = total + c
            table[key] = PRF.from_pr(total.precision, total.recall)
        if per_video:
            for (vid, _), c in zip(preds, counts):
                details.setdefault(vid, {})[key] = {"tp": c.tp, "fp": c.fp, "fn": c.fn}
    return EvalReport(table, details)
