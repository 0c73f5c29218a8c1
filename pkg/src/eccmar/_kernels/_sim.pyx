# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled recursion for matrix error-correction simulation.

The per-step work is a handful of products of tiny matrices (m, n <= ~10),
where Python call overhead dominates; plain C loops win over BLAS here.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def simulate_recursion(
    double[:, ::1] lam,
    double[:, ::1] psi,
    double[:, :, ::1] gamma1,
    double[:, :, ::1] gamma2,
    double[:, :, ::1] noise,
):
    """Iterate X_t = lam @ X_{t-1} @ psi' + sum_i gamma1[i] @ dX_{t-1-i} @ gamma2[i]' + noise[t].

    Starts from X = 0 with zero pre-sample differences. Returns the full
    (steps, m, n) array of levels.
    """
    cdef Py_ssize_t steps = noise.shape[0]
    cdef Py_ssize_t m = noise.shape[1]
    cdef Py_ssize_t n = noise.shape[2]
    cdef Py_ssize_t q = gamma1.shape[0]

    out_np = np.zeros((steps, m, n), dtype=np.float64)
    cdef double[:, :, ::1] out = out_np
    # Ring buffer of the q most recent differences, newest at (t - 1) % q.
    diffs_np = np.zeros((q if q > 0 else 1, m, n), dtype=np.float64)
    cdef double[:, :, ::1] diffs = diffs_np
    prev_np = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] prev = prev_np
    tmp_np = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_np
    cur_np = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] cur = cur_np

    cdef Py_ssize_t t, i, j, k, lag, slot
    cdef double acc

    for t in range(steps):
        # tmp = lam @ prev
        for i in range(m):
            for j in range(n):
                acc = 0.0
                for k in range(m):
                    acc += lam[i, k] * prev[k, j]
                tmp[i, j] = acc
        # cur = tmp @ psi' + noise[t]
        for i in range(m):
            for j in range(n):
                acc = 0.0
                for k in range(n):
                    acc += tmp[i, k] * psi[j, k]
                cur[i, j] = acc + noise[t, i, j]
        # Short-run terms on lagged differences.
        for lag in range(q):
            if lag >= t:
                break  # pre-sample differences are zero
            slot = (t - 1 - lag) % q
            # tmp = gamma1[lag] @ diffs[slot]
            for i in range(m):
                for j in range(n):
                    acc = 0.0
                    for k in range(m):
                        acc += gamma1[lag, i, k] * diffs[slot, k, j]
                    tmp[i, j] = acc
            # cur += tmp @ gamma2[lag]'
            for i in range(m):
                for j in range(n):
                    acc = 0.0
                    for k in range(n):
                        acc += tmp[i, k] * gamma2[lag, j, k]
                    cur[i, j] += acc
        if q > 0:
            slot = t % q
            for i in range(m):
                for j in range(n):
                    diffs[slot, i, j] = cur[i, j] - prev[i, j]
        for i in range(m):
            for j in range(n):
                prev[i, j] = cur[i, j]
                out[t, i, j] = cur[i, j]
    return out_np
