import cmath
import math

import numpy as np
import pytest

from castanet.errors import DomainError
from castanet.tempnet.params import init_params
from castanet.tempnet.stft import audio_features, stft


def naive_dft_magnitudes(frame):
    """Direct O(N^2) DFT, bins 0..N//2."""
    N = len(frame)
    return [abs(sum(frame[m] * cmath.exp(-2j * math.pi * k * m / N) for m in range(N)))
            for k in range(N // 2 + 1)]


def naive_stft(signal, window_len, hop, window="hann"):
    if window == "hann":
        w = [0.5 * (1 - math.cos(2 * math.pi * i / window_len)) for i in range(window_len)]
    else:
        w = [1.0] * window_len
    frames = []
    start = 0
    while start + window_len <= len(signal):
        frames.append(naive_dft_magnitudes([signal[start + i] * w[i] for i in range(window_len)]))
        start += hop
    return np.asarray(frames)


def matrix_dft_stft(signal, window_len, hop, window="hann"):
    """Same O(N^2) DFT as a dense matrix product, for the long-signal checks."""
    k = np.arange(window_len // 2 + 1)[:, None]
    m = np.arange(window_len)[None, :]
    basis = np.exp(-2j * np.pi * ((k * m) % window_len) / window_len)
    w = 0.5 * (1 - np.cos(2 * np.pi * np.arange(window_len) / window_len)) if window == "hann" \
        else np.ones(window_len)
    count = (len(signal) - window_len) // hop + 1
    frames = np.stack([signal[i * hop: i * hop + window_len] * w for i in range(count)])
    return np.abs(frames @ basis.T)


def test_frame_count_and_shape():
    s = np.random.default_rng(0).normal(size=1000)
    out = stft(s, 256, 128)
    assert out.shape == ((1000 - 256) // 128 + 1, 129)


def test_constant_signal_is_dc_only():
    out = stft(np.full(512, 3.0), 64, 16, window="rect")
    assert np.allclose(out[:, 1:], 0, atol=1e-12)
    assert np.allclose(out[:, 0], 3.0 * 64)
    hann_out = stft(np.full(512, 3.0), 64, 16)
    # periodic Hann leaks into bin 1 only
    assert np.allclose(hann_out[:, 2:], 0, atol=1e-12)


def test_zero_signal():
    assert not stft(np.zeros(300), 100, 50).any()


def test_bin_centred_sinusoid_rect():
    N, k0 = 64, 5
    s = np.cos(2 * np.pi * k0 * np.arange(4 * N) / N)
    out = stft(s, N, N, window="rect")
    assert np.all(out.argmax(axis=1) == k0)
    ref = naive_stft(s.tolist(), N, N, "rect")
    assert np.max(np.abs(out - ref)) < 1e-9
    off = np.delete(out, k0, axis=1)
    assert np.allclose(off, 0, atol=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_matches_scalar_naive_dft(seed):
    rng = np.random.default_rng(seed)
    s = rng.normal(size=int(rng.integers(40, 120)))
    wl = int(rng.integers(2, 40))
    hop = int(rng.integers(1, wl + 1))
    assert np.max(np.abs(stft(s, wl, hop) - naive_stft(s.tolist(), wl, hop))) < 1e-9


def test_matches_matrix_dft_long():
    rng = np.random.default_rng(11)
    for _ in range(5):
        n = int(rng.integers(256, 4097))
        s = rng.normal(size=n)
        assert np.max(np.abs(stft(s) - matrix_dft_stft(s, 256, 128))) < 1e-9


@pytest.mark.parametrize("args", [
    (np.zeros(10), 16, 4),
    (np.zeros(100), 1, 1),
    (np.zeros(100), 16, 0),
    (np.zeros(100), 16, 17),
])
def test_domain_errors(args):
    with pytest.raises(DomainError):
        stft(*args)


def test_audio_features_shape():
    params = init_params(33, 4, 0)
    v = audio_features(np.random.default_rng(0).normal(size=2000), params, window_len=64, hop=32)
    assert v.shape == (33,)
