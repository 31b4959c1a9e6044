# cython: language_level=3
"""Compiled CPM kernels: per-trial forward/backward passes.

Mirrors sitetwin._kernel_numpy operation-for-operation so both backends give
bit-identical results; see that module for the array layout contract.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def mcs_batch(
    cnp.int32_t[::1] topo,
    cnp.int32_t[::1] in_off,
    cnp.int32_t[::1] in_pred,
    cnp.int8_t[::1] in_kind,
    cnp.float64_t[::1] in_lag,
    cnp.int32_t[::1] out_off,
    cnp.int32_t[::1] out_succ,
    cnp.int8_t[::1] out_kind,
    cnp.float64_t[::1] out_lag,
    cnp.float64_t[:, ::1] durations,
    double eps,
):
    cdef Py_ssize_t n_trials = durations.shape[0]
    cdef Py_ssize_t n = durations.shape[1]
    finishes_arr = np.zeros(n_trials, dtype=np.float64)
    counts_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.float64_t[::1] finishes = finishes_arr
    cdef cnp.int64_t[::1] counts = counts_arr
    if n == 0:
        return finishes_arr, counts_arr

    es_arr = np.zeros(n, dtype=np.float64)
    ef_arr = np.zeros(n, dtype=np.float64)
    lf_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] es = es_arr
    cdef cnp.float64_t[::1] ef = ef_arr
    cdef cnp.float64_t[::1] lf = lf_arr

    cdef Py_ssize_t t, j
    cdef int a, p, s, r
    cdef double d_a, cand, val, finish
    for t in range(n_trials):
        finish = _forward(topo, in_off, in_pred, in_kind, in_lag, durations[t], es, ef)
        _backward(topo, out_off, out_succ, out_kind, out_lag, durations[t], finish, lf)
        finishes[t] = finish
        for j in range(n):
            a = topo[j]
            val = lf[a] - ef[a]
            if val <= eps and val >= -eps:
                counts[a] += 1
    return finishes_arr, counts_arr


def cpm_full(
    cnp.int32_t[::1] topo,
    cnp.int32_t[::1] in_off,
    cnp.int32_t[::1] in_pred,
    cnp.int8_t[::1] in_kind,
    cnp.float64_t[::1] in_lag,
    cnp.int32_t[::1] out_off,
    cnp.int32_t[::1] out_succ,
    cnp.int8_t[::1] out_kind,
    cnp.float64_t[::1] out_lag,
    cnp.float64_t[::1] durations,
):
    cdef Py_ssize_t n = durations.shape[0]
    es_arr = np.zeros(n, dtype=np.float64)
    ef_arr = np.zeros(n, dtype=np.float64)
    lf_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] es = es_arr
    cdef cnp.float64_t[::1] ef = ef_arr
    cdef cnp.float64_t[::1] lf = lf_arr
    if n == 0:
        return es_arr, ef_arr, lf_arr, 0.0
    cdef double finish = _forward(topo, in_off, in_pred, in_kind, in_lag, durations, es, ef)
    _backward(topo, out_off, out_succ, out_kind, out_lag, durations, finish, lf)
    return es_arr, ef_arr, lf_arr, finish


cdef double _forward(
    cnp.int32_t[::1] topo,
    cnp.int32_t[::1] in_off,
    cnp.int32_t[::1] in_pred,
    cnp.int8_t[::1] in_kind,
    cnp.float64_t[::1] in_lag,
    cnp.float64_t[:] d,
    cnp.float64_t[::1] es,
    cnp.float64_t[::1] ef,
) noexcept:
    cdef Py_ssize_t n = topo.shape[0]
    cdef Py_ssize_t j
    cdef int a, p, r, k
    cdef double d_a, val, cand, finish
    finish = 0.0
    for j in range(n):
        a = topo[j]
        d_a = d[a]
        val = 0.0
        for r in range(in_off[j], in_off[j + 1]):
            p = in_pred[r]
            k = in_kind[r]
            if k == 0:
                cand = ef[p] + in_lag[r]
            elif k == 1:
                cand = es[p] + in_lag[r]
            elif k == 2:
                cand = ef[p] + in_lag[r] - d_a
            else:
                cand = es[p] + in_lag[r] - d_a
            if cand > val:
                val = cand
        es[a] = val
        ef[a] = val + d_a
        if ef[a] > finish:
            finish = ef[a]
    return finish


cdef void _backward(
    cnp.int32_t[::1] topo,
    cnp.int32_t[::1] out_off,
    cnp.int32_t[::1] out_succ,
    cnp.int8_t[::1] out_kind,
    cnp.float64_t[::1] out_lag,
    cnp.float64_t[:] d,
    double finish,
    cnp.float64_t[::1] lf,
) noexcept:
    cdef Py_ssize_t n = topo.shape[0]
    cdef Py_ssize_t j
    cdef int a, s, r, k
    cdef double val, cand
    for j in range(n - 1, -1, -1):
        a = topo[j]
        val = finish
        for r in range(out_off[j], out_off[j + 1]):
            s = out_succ[r]
            k = out_kind[r]
            if k == 0:
                cand = lf[s] - d[s] - out_lag[r]
            elif k == 1:
                cand = lf[s] - d[s] - out_lag[r] + d[a]
            elif k == 2:
                cand = lf[s] - out_lag[r]
            else:
                cand = lf[s] - out_lag[r] + d[a]
            if cand < val:
                val = cand
        lf[a] = val
