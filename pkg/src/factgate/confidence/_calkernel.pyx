# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled calibration kernels: equal-width confidence binning and the
simplex grid search over ensemble weights. Hot loops only; all shaping,
validation, and tie-breaking live in Python. The numpy fallback in
_calkernel_py.py implements the same contract with identical accumulation
order, so results agree bit for bit."""

import numpy as np


def bin_stats(double[::1] conf, double[::1] correct, int bins):
    """Per-bin (count, sum of confidence, sum of correct) over equal-width
    bins on [0,1], last bin right-closed. conf values must lie in [0,1]."""
    cdef Py_ssize_t n = conf.shape[0]
    counts_arr = np.zeros(bins, dtype=np.int64)
    conf_sum_arr = np.zeros(bins, dtype=np.float64)
    acc_sum_arr = np.zeros(bins, dtype=np.float64)
    cdef long long[::1] counts = counts_arr
    cdef double[::1] conf_sum = conf_sum_arr
    cdef double[::1] acc_sum = acc_sum_arr
    cdef Py_ssize_t i
    cdef int idx
    for i in range(n):
        idx = <int>(conf[i] * bins)
        if idx >= bins:
            idx = bins - 1
        counts[idx] += 1
        conf_sum[idx] += conf[i]
        acc_sum[idx] += correct[i]
    return counts_arr, conf_sum_arr, acc_sum_arr


def grid_scores(double[::1] intrinsic, double[::1] external, double[::1] coherence,
                double[::1] correct, int m, int bins, double tau):
    """ECE and threshold accuracy at every simplex grid point (i/m, j/m, k/m).

    Grid points are enumerated with the alpha numerator i ascending, then the
    beta numerator j ascending (gamma determined); the caller maps flat index
    back to weights and applies tie-breaking.
    """
    cdef Py_ssize_t n = intrinsic.shape[0]
    cdef int npoints = (m + 1) * (m + 2) // 2
    ece_arr = np.empty(npoints, dtype=np.float64)
    acc_arr = np.empty(npoints, dtype=np.float64)
    cdef double[::1] ece = ece_arr
    cdef double[::1] acc = acc_arr

    conf_sum_arr = np.zeros(bins, dtype=np.float64)
    acc_sum_arr = np.zeros(bins, dtype=np.float64)
    cdef double[::1] conf_sum = conf_sum_arr
    cdef double[::1] acc_sum = acc_sum_arr

    cdef Py_ssize_t s
    cdef int i, j, b, idx, p = 0
    cdef double a, bw, g, c, e
    cdef long long hits
    for i in range(m + 1):
        a = (<double>i) / m
        for j in range(m - i + 1):
            bw = (<double>j) / m
            g = (<double>(m - i - j)) / m
            for b in range(bins):
                conf_sum[b] = 0.0
                acc_sum[b] = 0.0
            hits = 0
            for s in range(n):
                c = a * intrinsic[s] + bw * external[s] + g * coherence[s]
                if c > 1.0:
                    c = 1.0
                elif c < 0.0:
                    c = 0.0
                idx = <int>(c * bins)
                if idx >= bins:
                    idx = bins - 1
                conf_sum[idx] += c
                acc_sum[idx] += correct[s]
                if (c > tau) == (correct[s] != 0.0):
                    hits += 1
            e = 0.0
            for b in range(bins):
                if conf_sum[b] >= acc_sum[b]:
                    e += conf_sum[b] - acc_sum[b]
                else:
                    e += acc_sum[b] - conf_sum[b]
            ece[p] = e / n
            acc[p] = (<double>hits) / n
            p += 1
    return ece_arr, acc_arr
