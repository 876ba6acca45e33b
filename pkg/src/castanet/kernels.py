"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when it is
missing or when the environment variable ``CASTANET_PURE_PYTHON`` is set to
a non-empty value other than ``0``.
"""

import os

import numpy as np

from . import _pykernels

_force_py = os.environ.get("CASTANET_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_py:
        raise ImportError("pure-Python backend requested")
    from . import _native as _impl

    BACKEND = "native"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

BACKENDS = {"python": _pykernels}
if BACKEND == "native":
    BACKENDS["native"] = _impl


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return _impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {sorted(BACKENDS)}") from None


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def match_sweep(preds, gts, norm_len, u):
    return int(_impl.match_sweep(_f64(preds), _f64(gts), float(norm_len), float(u)))


def threshold_runs(scores, threshold, inclusive=False):
    return _impl.threshold_runs(_f64(scores), float(threshold), bool(inclusive))


def dilated_conv_forward(x, w, b, dilation):
    return _impl.dilated_conv_forward(_f64(x), _f64(w), _f64(b), int(dilation))


def dilated_conv_backward(x, w, dilation, grad):
    return _impl.dilated_conv_backward(_f64(x), _f64(w), int(dilation), _f64(grad))
