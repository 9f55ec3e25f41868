# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled brute-force k-nearest-neighbor kernel.

Maintains a k-slot insertion buffer ordered by (squared distance,
dataset row index) per query; exact and deterministic.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def topk(double[:, ::1] pool_x, double[:, ::1] query_x,
         long long[::1] pool_rows, long long[::1] query_rows, int k):
    cdef Py_ssize_t n_pool = pool_x.shape[0]
    cdef Py_ssize_t n_query = query_x.shape[0]
    cdef Py_ssize_t d = pool_x.shape[1]
    cdef Py_ssize_t i, j, c, pos, m
    cdef double dist, diff
    cdef long long row

    out_arr = np.empty((n_query, k), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    best_d_arr = np.empty(k, dtype=np.float64)
    best_r_arr = np.empty(k, dtype=np.int64)
    cdef double[::1] best_d = best_d_arr
    cdef long long[::1] best_r = best_r_arr
    cdef int filled

    for i in range(n_query):
        filled = 0
        for j in range(n_pool):
            row = pool_rows[j]
            if row == query_rows[i]:
                continue
            dist = 0.0
            for c in range(d):
                diff = pool_x[j, c] - query_x[i, c]
                dist += diff * diff
            if filled == k:
                if dist > best_d[k - 1]:
                    continue
                if dist == best_d[k - 1] and row > best_r[k - 1]:
                    continue
            # insertion position by (dist, row)
            pos = filled if filled < k else k - 1
            m = pos
            while m > 0 and (best_d[m - 1] > dist or
                             (best_d[m - 1] == dist and best_r[m - 1] > row)):
                m -= 1
            for c in range(pos, m, -1):
                best_d[c] = best_d[c - 1]
                best_r[c] = best_r[c - 1]
            best_d[m] = dist
            best_r[m] = row
            if filled < k:
                filled += 1
        for j in range(k):
            out[i, j] = best_r[j]
    return out_arr
