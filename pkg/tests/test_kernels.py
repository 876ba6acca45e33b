import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from castanet import kernels

native = pytest.mark.skipif("native" not in kernels.BACKENDS, reason="compiled extension not built")


def test_env_forces_fallback():
    env = dict(os.environ, CASTANET_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from castanet import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError, match="cuda"):
        kernels.get_backend("cuda")


def test_threshold_runs_examples():
    starts, ends = kernels.threshold_runs([0.1, 0.6, 0.7, 0.2, 0.9], 0.5)
    assert starts.tolist() == [1, 4] and ends.tolist() == [2, 4]
    starts, ends = kernels.threshold_runs([0.5, 0.5], 0.5)
    assert starts.size == 0
    starts, ends = kernels.threshold_runs([0.5, 0.5], 0.5, inclusive=True)
    assert starts.tolist() == [0] and ends.tolist() == [1]


pts = st.lists(st.floats(0, 30, allow_nan=False), max_size=40).map(sorted)


@native
@settings(max_examples=200, deadline=None)
@given(p=pts, g=pts, u=st.floats(0.001, 1.0))
def test_match_sweep_backends_agree(p, g, u):
    py, nat = kernels.get_backend("python"), kernels.get_backend("native")
    a, b = np.asarray(p, float), np.asarray(g, float)
    assert py.match_sweep(a, b, 30.0, u) == nat.match_sweep(a, b, 30.0, u)


@native
@settings(max_examples=200, deadline=None)
@given(s=st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]) | st.floats(0, 1), max_size=60),
       thr=st.sampled_from([0.25, 0.5, 0.75]), inclusive=st.booleans())
def test_threshold_runs_backends_agree(s, thr, inclusive):
    py, nat = kernels.get_backend("python"), kernels.get_backend("native")
    a = np.asarray(s, float)
    for x, y in zip(py.threshold_runs(a, thr, inclusive), nat.threshold_runs(a, thr, inclusive)):
        assert np.array_equal(x, y)


@native
def test_conv_backends_agree_single_step_and_large_dilation():
    py, nat = kernels.get_backend("python"), kernels.get_backend("native")
    rng = np.random.default_rng(0)
    for T, d in ((1, 1), (2, 4), (5, 64)):
        x = rng.normal(size=(2, T, 3))
        w = rng.normal(size=(3, 3, 3))
        b = rng.normal(size=3)
        g = rng.normal(size=(2, T, 3))
        assert np.allclose(py.dilated_conv_forward(x, w, b, d), nat.dilated_conv_forward(x, w, b, d))
        for u, v in zip(py.dilated_conv_backward(x, w, d, g), nat.dilated_conv_backward(x, w, d, g)):
            assert np.allclose(u, v)
