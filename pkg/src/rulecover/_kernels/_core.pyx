# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled counting kernels: the hot loops of the fitting algorithms."""

import numpy as np


def leaf_label_env_counts(const unsigned char[:, ::1] preds,
                          const unsigned char[::1] y,
                          const long long[::1] e,
                          int n_env):
    cdef Py_ssize_t m = preds.shape[0]
    cdef Py_ssize_t n_rules = preds.shape[1]
    cdef int n_groups = 2 * n_env
    # accumulate rule-fire totals per (label, env) group with a branchless
    # contiguous inner loop; zero-counts are group size minus fires
    fires_arr = np.zeros((n_groups, n_rules), dtype=np.int32)
    sizes_arr = np.zeros(n_groups, dtype=np.int64)
    cdef int[:, ::1] fires = fires_arr
    cdef long long[::1] sizes = sizes_arr
    cdef Py_ssize_t i, r
    cdef int g
    cdef const unsigned char * row
    cdef int * acc
    for i in range(m):
        g = y[i] * n_env + <int> e[i]
        sizes[g] += 1
        row = &preds[i, 0]
        acc = &fires[g, 0]
        for r in range(n_rules):
            acc[r] += row[r]
    zeros = sizes_arr[:, None] - fires_arr.astype(np.int64)
    return np.ascontiguousarray(
        zeros.reshape(2, n_env, n_rules).transpose(2, 0, 1)
    )


def stratified_label_env_counts(const long long[::1] strata,
                                Py_ssize_t n_strata,
                                const unsigned char[::1] y,
                                const long long[::1] e,
                                int n_env):
    cdef Py_ssize_t m = strata.shape[0]
    counts_arr = np.zeros((n_strata, 2, n_env), dtype=np.int64)
    cdef long long[:, :, ::1] counts = counts_arr
    cdef Py_ssize_t i
    for i in range(m):
        counts[strata[i], y[i], e[i]] += 1
    return counts_arr
