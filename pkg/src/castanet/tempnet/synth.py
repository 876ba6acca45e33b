"""Synthetic boundary dataset standing in for backbone video features.

Each video is a sequence of segments. Every frame carries its segment's
mean vector plus Gaussian noise, and frames within one sampling stride of
a boundary additionally carry a fixed signature vector. Annotator 0 holds
the true boundaries; further annotators click near them with jitter and
occasionally miss one.
"""

from __future__ import annotations

import zlib

import numpy as np

from ..records import AnnotationSet, VideoMeta
from ..sampling import SamplePlan, sampling_stride

FPS_CHOICES = (8.0, 12.0, 24.0, 25.0, 29.97, 30.0)
MIN_GAP_SEC = 3.0
EDGE_MARGIN_SEC = 1.2


def _boundaries(rng, duration):
    for _ in range(1000):
        k = int(rng.integers(1, 4))
        b = np.sort(rng.uniform(EDGE_MARGIN_SEC, duration - EDGE_MARGIN_SEC, size=k))
        if k == 1 or np.diff(b).min() >= MIN_GAP_SEC:
            return np.round(b, 3)
    return np.round(np.array([duration / 2]), 3)


def _noisy_annotator(rng, truth, duration, jitter, miss):
    kept = [t + rng.normal(0, jitter) for t in truth if rng.random() >= miss]
    kept = np.round(np.clip(np.sort(kept), 0.0, duration), 3)
    return np.unique(kept)


def make_dataset(num_videos: int = 200, seed: int = 0, jitter: float = 0.1,
                 miss: float = 0.15) -> list[tuple[VideoMeta, AnnotationSet]]:
    """Deterministic list of ``(meta, annotations)`` records."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(num_videos):
        fps = float(FPS_CHOICES[rng.integers(len(FPS_CHOICES))])
        num_frames = int(round(rng.uniform(8.0, 12.0) * fps))
        meta = VideoMeta(f"syn{i:04d}", fps, num_frames)
        truth = _boundaries(rng, meta.duration_sec)
        annotators = [truth.tolist()]
        for _ in range(int(rng.integers(0, 3))):
            annotators.append(_noisy_annotator(rng, truth, meta.duration_sec, jitter, miss).tolist())
        out.append((meta, AnnotationSet(meta.video_id, annotators, duration_sec=meta.duration_sec)))
    return out


def video_seed(video_id: str, seed: int) -> int:
    return (zlib.crc32(video_id.encode("utf-8")) ^ (seed * 0x9E3779B1)) & 0xFFFFFFFF


def signature(dim: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng([seed, 0x5157])
    v = rng.normal(size=dim)
    return 1.5 * v / np.linalg.norm(v) * np.sqrt(dim) / 2


def render_features(meta: VideoMeta, boundaries, dim: int = 8, seed: int = 0,
                    noise: float = 0.35) -> np.ndarray:
    """Per-frame features ``(num_frames, dim)`` for a video with the given boundaries."""
    rng = np.random.default_rng(video_seed(meta.video_id, seed))
    b = np.asarray(boundaries, dtype=float)
    t = np.arange(meta.num_frames) / meta.fps
    seg = np.searchsorted(b, t, side="right")
    means = rng.normal(size=(len(b) + 1, dim))
    feats = means[seg] + rng.normal(0, noise, size=(meta.num_frames, dim))
    if len(b):
        reach = sampling_stride(meta.fps) / meta.fps
        near = np.abs(t[:, None] - b[None, :]).min(axis=1) <= reach
        feats[near] += signature(dim, seed)
    return feats


def gather_windows(features: np.ndarray, plan: SamplePlan) -> np.ndarray:
    """Context windows ``(num_candidates, 2n, dim)`` indexed out of ``features``."""
    return features[plan.windows]
