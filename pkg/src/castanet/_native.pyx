# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Signatures mirror :mod:`castanet._pykernels` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def match_sweep(const double[::1] preds, const double[::1] gts, double norm_len, double u):
    cdef Py_ssize_t i = 0, j = 0, n = preds.shape[0], m = gts.shape[0]
    cdef Py_ssize_t tp = 0
    with nogil:
        while i < n and j < m:
            if fabs(preds[i] - gts[j]) / norm_len <= u:
                tp += 1
                i += 1
                j += 1
            elif preds[i] < gts[j]:
                i += 1
            else:
                j += 1
    return tp


def threshold_runs(const double[::1] scores, double threshold, bint inclusive):
    cdef Py_ssize_t n = scores.shape[0], k, nruns = 0
    cdef bint inside = False, hit
    starts = np.empty(n, dtype=np.int64)
    ends = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] s = starts
    cdef cnp.int64_t[::1] e = ends
    with nogil:
        for k in range(n):
            if inclusive:
                hit = scores[k] >= threshold
            else:
                hit = scores[k] > threshold
            if hit and not inside:
                s[nruns] = k
                inside = True
            elif not hit and inside:
                e[nruns] = k - 1
                nruns += 1
                inside = False
        if inside:
            e[nruns] = n - 1
            nruns += 1
    return starts[:nruns].copy(), ends[:nruns].copy()


def dilated_conv_forward(const double[:, :, ::1] x, const double[:, :, ::1] w,
                         const double[::1] b, Py_ssize_t dilation):
    cdef Py_ssize_t B = x.shape[0], T = x.shape[1], Din = x.shape[2], Dout = w.shape[2]
    cdef Py_ssize_t bb, t, k, i, o, src
    cdef double xv
    out_arr = np.empty((B, T, Dout), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    with nogil:
        for bb in range(B):
            for t in range(T):
                for o in range(Dout):
                    out[bb, t, o] = b[o]
                for k in range(3):
                    src = t + (k - 1) * dilation
                    if src < 0 or src >= T:
                        continue
                    for i in range(Din):
                        xv = x[bb, src, i]
                        for o in range(Dout):
                            out[bb, t, o] += xv * w[k, i, o]
    return out_arr


def dilated_conv_backward(const double[:, :, ::1] x, const double[:, :, ::1] w,
                          Py_ssize_t dilation, const double[:, :, ::1] grad):
    cdef Py_ssize_t B = x.shape[0], T = x.shape[1], Din = x.shape[2], Dout = w.shape[2]
    cdef Py_ssize_t bb, t, k, i, o, src
    cdef double acc, xv
    gx_arr = np.zeros((B, T, Din), dtype=np.float64)
    gw_arr = np.zeros((3, Din, Dout), dtype=np.float64)
    gb_arr = np.zeros(Dout, dtype=np.float64)
    cdef double[:, :, ::1] gx = gx_arr
    cdef double[:, :, ::1] gw = gw_arr
    cdef double[::1] gb = gb_arr
    with nogil:
        for bb in range(B):
            for t in range(T):
                for o in range(Dout):
                    gb[o] += grad[bb, t, o]
                for k in range(3):
                    src = t + (k - 1) * dilation
                    if src < 0 or src >= T:
                        continue
                    for i in range(Din):
                        xv = x[bb, src, i]
                        acc = 0.0
                        for o in range(Dout):
                            acc += w[k, i, o] * grad[bb, t, o]
                            gw[k, i, o] += xv * grad[bb, t, o]
                        gx[bb, src, i] += acc
    return gx_arr, gw_arr, gb_arr
