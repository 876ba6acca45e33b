"""Pure-Python/numpy versions of the compiled kernels in ``_native.pyx``.

Used when the extension is not built or ``CASTANET_PURE_PYTHON=1`` is set.
"""

import numpy as np


def match_sweep(preds, gts, norm_len, u):
    i = j = tp = 0
    n, m = len(preds), len(gts)
    while i < n and j < m:
        p, g = preds[i], gts[j]
        if abs(p - g) / norm_len <= u:
            tp += 1
            i += 1
            j += 1
        elif p < g:
            i += 1
        else:
            j += 1
    return tp


def threshold_runs(scores, threshold, inclusive):
    scores = np.asarray(scores, dtype=float)
    hit = scores >= threshold if inclusive else scores > threshold
    edges = np.diff(np.concatenate(([0], hit.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return starts.astype(np.int64), ends.astype(np.int64)


def _shifted(x, offset):
    """``x`` shifted along time so ``out[:, t] = x[:, t + offset]``, zero outside."""
    out = np.zeros_like(x)
    T = x.shape[1]
    if offset >= 0:
        if offset < T:
            out[:, : T - offset] = x[:, offset:]
    elif -offset < T:
        out[:, -offset:] = x[:, : T + offset]
    return out


def dilated_conv_forward(x, w, b, dilation):
    out = np.broadcast_to(b, x.shape[:2] + (w.shape[2],)).copy()
    for k in range(3):
        out += _shifted(x, (k - 1) * dilation) @ w[k]
    return out


def dilated_conv_backward(x, w, dilation, grad):
    gx = np.zeros_like(x)
    gw = np.empty_like(w)
    gb = grad.sum(axis=(0, 1))
    for k in range(3):
        off = (k - 1) * dilation
        gw[k] = np.einsum("bti,bto->io", _shifted(x, off), grad)
        gx += _shifted(grad @ w[k].T, -off)
    return gx, gw, gb
