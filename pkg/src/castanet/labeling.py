"""Rel.Dis. and cascaded ground-truth label generation.

A candidate is a positive at threshold ``u`` when some ground-truth boundary
lies within Rel.Dis. ``u`` of it. Lowering ``u`` can only remove positives,
so the labels of a non-increasing ladder ``u_1 >= ... >= u_N`` are nested.

Normalisation modes (``norm``):

``"duration"``
    the whole clip, ``num_frames / fps`` (default)
``"segment"``
    the ground-truth segment that ends at the boundary, i.e. the gap to the
    previous boundary or to the clip start; a zero-length segment falls back
    to the gap to the next boundary, then to the clip duration
``"window"``
    the real-time span of the candidate context window,
    ``2n * stride / fps``; ``u = 0.5`` then means "the boundary lies inside
    the window"
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, ValidationError
from .records import AnnotationSet, CascadeConfig, VideoMeta
from .sampling import SamplePlan

MERGE_MODES = ("union", "per-annotator-majority")
NORM_MODES = ("duration", "segment", "window")


def rel_dis(pred_t: float, gt_t: float, norm_len: float) -> float:
    """``|pred_t - gt_t| / norm_len``."""
    if not norm_len > 0:
        raise DomainError(f"norm_len must be > 0, got {norm_len!r}")
    return abs(pred_t - gt_t) / norm_len


def merge_annotators(ann: AnnotationSet, fps: float) -> np.ndarray:
    """Sorted union of all annotators' boundaries.

    Clicks closer than half a frame (``1 / (2 fps)``) to the previously kept
    boundary are treated as the same boundary and dropped.
    """
    allb = np.sort(np.concatenate([np.asarray(a, float) for a in ann.annotators] + [np.empty(0)]))
    if allb.size == 0:
        return allb
    tol = 1.0 / (2.0 * fps)
    kept = [allb[0]]
    for b in allb[1:]:
        if b - kept[-1] > tol:
            kept.append(b)
    return np.asarray(kept)


def boundary_norms(boundaries, meta: VideoMeta, norm: str, plan: SamplePlan | None = None):
    """Per-boundary normalising length for the given ``norm`` mode."""
    b = np.asarray(boundaries, dtype=float)
    if norm == "duration":
        return np.full(b.shape, meta.duration_sec)
    if norm == "window":
        if plan is None:
            raise ConfigurationError("norm='window' needs a sample plan")
        return np.full(b.shape, 2 * plan.context * plan.stride_frames / meta.fps)
    if norm == "segment":
        left = np.diff(np.concatenate(([0.0], b)))
        right = np.diff(np.concatenate((b, [meta.duration_sec])))
        out = np.where(left > 0, left, right)
        return np.where(out > 0, out, meta.duration_sec)
    raise ConfigurationError(f"unknown norm mode {norm!r}; expected one of {NORM_MODES}")


def _hits(times, boundaries, norms, u):
    """Boolean (candidates, boundaries) matrix of Rel.Dis. <= u."""
    if len(boundaries) == 0:
        return np.zeros((len(times), 0), dtype=bool)
    # a near-zero segment norm overflows to inf, which correctly compares False
    with np.errstate(over="ignore"):
        return np.abs(times[:, None] - boundaries[None, :]) / norms[None, :] <= u


def make_labels(plan: SamplePlan, ann: AnnotationSet, meta: VideoMeta, u: float,
                merge_mode: str = "union", norm: str = "duration") -> np.ndarray:
    """Binary labels (uint8) for every candidate of ``plan`` at threshold ``u``."""
    if not 0.0 < u <= 1.0:
        raise DomainError(f"u must lie in (0, 1], got {u!r}")
    if plan.video_id != ann.video_id or ann.video_id != meta.video_id:
        raise ValidationError("plan, annotations and meta disagree", plan.video_id, "video_id")
    times = np.asarray(plan.candidate_times, dtype=float)
    if merge_mode == "union":
        merged = merge_annotators(ann, meta.fps)
        hits = _hits(times, merged, boundary_norms(merged, meta, norm, plan), u)
        return hits.any(axis=1).astype(np.uint8)
    if merge_mode == "per-annotator-majority":
        votes = np.zeros(len(times), dtype=np.int64)
        for lst in ann.annotators:
            b = np.asarray(lst, dtype=float)
            votes += _hits(times, b, boundary_norms(b, meta, norm, plan), u).any(axis=1)
        return (2 * votes > ann.num_annotators).astype(np.uint8)
    raise ConfigurationError(f"unknown merge mode {merge_mode!r}; expected one of {MERGE_MODES}")


@dataclass(frozen=True)
class LabelSequence:
    video_id: str
    candidate_times: tuple[float, ...]
    stage_labels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.candidate_times)
        for n, lab in enumerate(self.stage_labels):
            if len(lab) != k:
                raise ValidationError(f"stage {n} has {len(lab)} labels for {k} candidates",
                                      self.video_id, "stage_labels")
            if any(v not in (0, 1) for v in lab):
                raise ValidationError("labels must be 0 or 1", self.video_id, "stage_labels")
        for n in range(len(self.stage_labels) - 1):
            if any(b and not a for a, b in zip(self.stage_labels[n], self.stage_labels[n + 1])):
                raise ValidationError(f"stage {n + 1} labels not nested in stage {n}",
                                      self.video_id, "stage_labels")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.stage_labels, dtype=np.uint8).reshape(len(self.stage_labels), -1)

    def to_obj(self):
        return {"video_id": self.video_id, "candidate_times": list(self.candidate_times),
                "stage_labels": [list(s) for s in self.stage_labels]}

    @classmethod
    def from_obj(cls, obj):
        return cls(obj["video_id"], tuple(float(t) for t in obj["candidate_times"]),
                   tuple(tuple(int(v) for v in s) for s in obj["stage_labels"]))


def make_cascade_labels(plan: SamplePlan, ann: AnnotationSet, meta: VideoMeta,
                        cfg: CascadeConfig, merge_mode: str = "union",
                        norm: str = "duration") -> LabelSequence:
    stages = tuple(
        tuple(make_labels(plan, ann, meta, u, merge_mode, norm).tolist())
        for u in cfg.gt_thresholds
    )
    return LabelSequence(plan.video_id, tuple(plan.candidate_times), stages)
