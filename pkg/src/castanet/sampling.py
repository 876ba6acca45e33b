"""FPS-adaptive frame sampling and candidate context windows."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .records import VideoMeta

#: Target sampled frames per second. A video at ``fps`` keeps one frame in ``ceil(fps / 8)``.
SAMPLES_PER_SECOND = 8
DEFAULT_CONTEXT = 8


def sampling_stride(fps: float) -> int:
    """Frame stride ``ceil(fps / 8)``.

    >>> sampling_stride(30), sampling_stride(8), sampling_stride(25)
    (4, 1, 4)
    """
    if not (isinstance(fps, (int, float)) and math.isfinite(fps) and fps > 0):
        raise DomainError(f"fps must be > 0, got {fps!r}")
    return max(1, math.ceil(fps / SAMPLES_PER_SECOND))


def window_span(fps: float, n: int) -> float:
    """Seconds covered by an unclamped window of ``n`` sampled frames on each side."""
    return 2 * n * sampling_stride(fps) / fps


@dataclass(frozen=True)
class SamplePlan:
    video_id: str
    stride_frames: int
    candidate_frames: tuple[int, ...]
    candidate_times: tuple[float, ...]
    windows: np.ndarray  # (num_candidates, 2n) int64

    def __post_init__(self):
        w = np.asarray(self.windows, dtype=np.int64)
        if w.ndim != 2 or w.shape[0] != len(self.candidate_times) or w.shape[1] % 2:
            raise ValidationError(
                f"windows must be (num_candidates, 2n), got shape {w.shape}", self.video_id, "windows"
            )
        if self.stride_frames < 1:
            raise ValidationError("stride_frames must be >= 1", self.video_id, "stride_frames")
        if w.size and np.any(np.diff(w, axis=1) < 0):
            raise ValidationError("window frames must be non-decreasing", self.video_id, "windows")
        if len(self.candidate_frames) != len(self.candidate_times):
            raise ValidationError("candidate frame/time length mismatch", self.video_id,
                                  "candidate_times")
        w.setflags(write=False)
        object.__setattr__(self, "windows", w)

    @property
    def context(self) -> int:
        return self.windows.shape[1] // 2

    def __len__(self):
        return len(self.candidate_times)

    def to_obj(self) -> dict:
        return {
            "video_id": self.video_id,
            "stride_frames": self.stride_frames,
            "candidate_times": list(self.candidate_times),
            "windows": self.windows.tolist(),
        }

    @classmethod
    def from_obj(cls, obj, fps=None) -> "SamplePlan":
        times = tuple(float(t) for t in obj["candidate_times"])
        stride = int(obj["stride_frames"])
        # frame indices are recovered from the grid: candidate i sits on frame i * stride
        frames = tuple(i * stride for i in range(len(times)))
        windows = np.asarray(obj["windows"], dtype=np.int64).reshape(len(times), -1)
        return cls(obj["video_id"], stride, frames, times, windows)


def candidate_positions(meta: VideoMeta, n: int = DEFAULT_CONTEXT) -> SamplePlan:
    """Candidates on every ``stride``-th frame from frame 0, each with a 2n-frame window.

    The window of candidate frame ``k`` holds frames ``k - n*s, ..., k - s`` and
    ``k + s, ..., k + n*s`` (the candidate itself excluded), clamped into
    ``[0, num_frames - 1]``.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"context n must be an integer >= 1, got {n!r}")
    s = sampling_stride(meta.fps)
    frames = np.arange(0, meta.num_frames, s, dtype=np.int64)
    offsets = np.concatenate([np.arange(-n, 0), np.arange(1, n + 1)]) * s
    windows = np.clip(frames[:, None] + offsets[None, :], 0, meta.num_frames - 1)
    times = tuple(float(f) / meta.fps for f in frames.tolist())
    return SamplePlan(meta.video_id, s, tuple(frames.tolist()), times, windows)
