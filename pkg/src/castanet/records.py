"""Domain records and their invariants.

Every record is a frozen dataclass that validates itself on construction,
so an instance that exists is an instance that satisfies its invariants.
Sequences are stored as tuples of Python floats; this keeps the records
hashable and makes JSON round trips bit-exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, ValidationError


def _as_float_tuple(values, video_id, name) -> tuple[float, ...]:
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"expected a list of numbers ({exc})", video_id, name) from None
    for v in out:
        if not math.isfinite(v):
            raise ValidationError("non-finite value", video_id, name)
    return out


def _check_strictly_increasing(values, video_id, name):
    for a, b in zip(values, values[1:]):
        if not b > a:
            raise ValidationError("timestamps not strictly increasing", video_id, name)


@dataclass(frozen=True)
class VideoMeta:
    video_id: str
    fps: float
    num_frames: int

    def __post_init__(self):
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValidationError("video_id must be a non-empty string", self.video_id, "video_id")
        if isinstance(self.fps, bool) or not isinstance(self.fps, (int, float)):
            raise ValidationError("fps must be a number", self.video_id, "fps")
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise ValidationError("fps must be > 0", self.video_id, "fps")
        if isinstance(self.num_frames, bool) or not isinstance(self.num_frames, (int, np.integer)):
            raise ValidationError("num_frames must be an integer", self.video_id, "num_frames")
        if self.num_frames < 1:
            raise ValidationError("num_frames must be >= 1", self.video_id, "num_frames")
        object.__setattr__(self, "fps", float(self.fps))
        object.__setattr__(self, "num_frames", int(self.num_frames))

    @property
    def duration_sec(self) -> float:
        return self.num_frames / self.fps

    def frame_index(self, t: float) -> int:
        return int(round(t * self.fps))


def validate_boundaries(timestamps, duration_sec=None, video_id=None, name="timestamps"):
    """Return ``timestamps`` as a tuple after checking the boundary-list invariants.

    Boundaries must be finite, strictly increasing and, when ``duration_sec``
    is given, inside ``[0, duration_sec]``.
    """
    ts = _as_float_tuple(timestamps, video_id, name)
    _check_strictly_increasing(ts, video_id, name)
    if duration_sec is not None and ts:
        if ts[0] < 0 or ts[-1] > duration_sec:
            raise ValidationError(
                f"boundary outside [0, {duration_sec:g}] seconds", video_id, name
            )
    return ts


@dataclass(frozen=True)
class AnnotationSet:
    video_id: str
    annotators: tuple[tuple[float, ...], ...]
    duration_sec: float | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.annotators, (str, bytes)) or not isinstance(self.annotators, Sequence):
            raise ValidationError("annotators must be a list of lists", self.video_id, "annotators")
        if len(self.annotators) == 0:
            raise ValidationError("at least one annotator required", self.video_id, "annotators")
        checked = []
        for i, lst in enumerate(self.annotators):
            if isinstance(lst, (str, bytes)) or not isinstance(lst, Sequence):
                raise ValidationError(
                    "each annotator must be a list of numbers", self.video_id, f"annotators[{i}]"
                )
            checked.append(
                validate_boundaries(lst, self.duration_sec, self.video_id, f"annotators[{i}]")
            )
        object.__setattr__(self, "annotators", tuple(checked))

    @property
    def num_annotators(self) -> int:
        return len(self.annotators)


@dataclass(frozen=True)
class ScoreSequence:
    video_id: str
    timestamps: tuple[float, ...]
    scores: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.video_id, str) or not self.video_id:
            raise ValidationError("video_id must be a non-empty string", self.video_id, "video_id")
        ts = _as_float_tuple(self.timestamps, self.video_id, "timestamps")
        sc = _as_float_tuple(self.scores, self.video_id, "scores")
        _check_strictly_increasing(ts, self.video_id, "timestamps")
        if len(ts) != len(sc):
            raise ValidationError(
                f"{len(ts)} timestamps but {len(sc)} scores", self.video_id, "scores"
            )
        for s in sc:
            if not 0.0 <= s <= 1.0:
                raise ValidationError(f"score {s!r} outside [0, 1]", self.video_id, "scores")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "scores", sc)

    def __len__(self):
        return len(self.scores)

    @classmethod
    def from_arrays(cls, video_id, timestamps, scores) -> "ScoreSequence":
        return cls(video_id, tuple(np.asarray(timestamps, float).tolist()),
                   tuple(np.asarray(scores, float).tolist()))

    def times_array(self) -> np.ndarray:
        return np.asarray(self.timestamps, dtype=float)

    def scores_array(self) -> np.ndarray:
        return np.asarray(self.scores, dtype=float)


TAU_ORDER_MODES = ("warn", "increasing", "any")


@dataclass(frozen=True)
class CascadeConfig:
    """Ground-truth Rel.Dis. ladder ``u`` and mask thresholds ``tau``.

    ``tau_order`` controls how the ordering of the mask thresholds is checked:
    ``"warn"`` (default) accepts any order but warns unless strictly
    increasing, ``"increasing"`` rejects anything else, ``"any"`` is silent.
    """

    gt_thresholds: tuple[float, ...]
    mask_thresholds: tuple[float, ...]
    tau_order: str = field(default="warn", compare=False)

    def __post_init__(self):
        u = tuple(float(x) for x in self.gt_thresholds)
        tau = tuple(float(x) for x in self.mask_thresholds)
        if not u:
            raise ConfigurationError("at least one ground-truth threshold required")
        for x in u:
            if not (math.isfinite(x) and 0.0 < x <= 1.0):
                raise ConfigurationError(f"ground-truth threshold {x!r} outside (0, 1]")
        for a, b in zip(u, u[1:]):
            if b > a:
                raise ConfigurationError(f"ground-truth thresholds must be non-increasing: {list(u)}")
        if len(tau) != len(u) - 1:
            raise ConfigurationError(
                f"{len(u)} heads need {len(u) - 1} mask thresholds, got {len(tau)}"
            )
        for x in tau:
            if not (math.isfinite(x) and 0.0 <= x <= 1.0):
                raise ConfigurationError(f"mask threshold {x!r} outside [0, 1]")
        if self.tau_order not in TAU_ORDER_MODES:
            raise ConfigurationError(f"tau_order must be one of {TAU_ORDER_MODES}")
        increasing = all(b > a for a, b in zip(tau, tau[1:]))
        if not increasing:
            if self.tau_order == "increasing":
                raise ConfigurationError(f"mask thresholds must be strictly increasing: {list(tau)}")
            if self.tau_order == "warn":
                warnings.warn(
                    f"mask thresholds {list(tau)} are not strictly increasing", UserWarning,
                    stacklevel=3,
                )
        object.__setattr__(self, "gt_thresholds", u)
        object.__setattr__(self, "mask_thresholds", tau)

    @property
    def num_heads(self) -> int:
        return len(self.gt_thresholds)


def f1_score(precision: float, recall: float) -> float:
    if precision == 0 and recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    def __post_init__(self):
        for name in ("precision", "recall", "f1"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} {v!r} outside [0, 1]", field=name)

    @classmethod
    def from_pr(cls, precision, recall) -> "PRF":
        return cls(float(precision), float(recall), f1_score(precision, recall))

    def to_dict(self):
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def threshold_key(u: float) -> str:
    return repr(float(u))


@dataclass(frozen=True)
class EvalReport:
    per_threshold: Mapping[str, PRF]
    per_video: Mapping[str, Mapping[str, dict]] | None = None

    def to_dict(self, include_videos=False):
        out = {k: v.to_dict() for k, v in self.per_threshold.items()}
        if include_videos and self.per_video is not None:
            out = {"per_threshold": out, "per_video": {k: dict(v) for k, v in self.per_video.items()}}
        return out

    def __getitem__(self, u) -> PRF:
        key = u if isinstance(u, str) else threshold_key(u)
        return self.per_threshold[key]
