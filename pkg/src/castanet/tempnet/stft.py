"""Magnitude short-time Fourier transform and the audio branch built on it."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from .layers import max_pool_time, temporal_stack
from .params import NetParams

DEFAULT_WINDOW = 256
DEFAULT_HOP = 128


def hann(n: int) -> np.ndarray:
    """Periodic Hann window ``0.5 - 0.5 cos(2 pi k / n)``."""
    k = np.arange(n)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / n)


def frame_signal(signal, window_len: int, hop: int) -> np.ndarray:
    signal = np.asarray(signal, dtype=float)
    count = (len(signal) - window_len) // hop + 1
    idx = np.arange(window_len)[None, :] + hop * np.arange(count)[:, None]
    return signal[idx]


def stft(signal, window_len: int = DEFAULT_WINDOW, hop: int = DEFAULT_HOP,
         window: str = "hann") -> np.ndarray:
    """Magnitude spectrogram, shape ``(frames, window_len // 2 + 1)``.

    ``frames = (len(signal) - window_len) // hop + 1``; no padding is applied.
    ``window`` is ``"hann"`` or ``"rect"``.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1:
        raise DomainError(f"signal must be 1-D, got shape {signal.shape}")
    if window_len < 2:
        raise DomainError(f"window_len must be >= 2, got {window_len}")
    if not 1 <= hop <= window_len:
        raise DomainError(f"hop must be in [1, window_len], got {hop}")
    if len(signal) < window_len:
        raise DomainError(f"signal of length {len(signal)} is shorter than the window ({window_len})")
    if window == "hann":
        w = hann(window_len)
    elif window == "rect":
        w = np.ones(window_len)
    else:
        raise DomainError(f"unknown window {window!r}")
    return np.abs(np.fft.rfft(frame_signal(signal, window_len, hop) * w, axis=1))


def audio_features(signal, params: NetParams, window_len: int = DEFAULT_WINDOW,
                   hop: int = DEFAULT_HOP) -> np.ndarray:
    """Spectrogram frames passed through a dilated stack, then max-pooled over time.

    ``params.dim`` must equal ``window_len // 2 + 1``.
    """
    spec = stft(signal, window_len, hop)
    return max_pool_time(temporal_stack(spec, params))
