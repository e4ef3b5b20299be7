# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: batched PageRank power iteration and label propagation.

Both kernels traverse the CSR matrix once per iteration for the whole batch
(SpMM with the batch as the contiguous inner dimension), which is what makes
them faster than column-at-a-time SpMV. Converged PageRank columns freeze:
their values are never updated again, so results are independent of the batch
composition. Semantics must stay in lockstep with kgrec.kernels.pure; the
test suite asserts agreement between the two backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def pagerank_power(
    cnp.int32_t[::1] indptr,
    cnp.int32_t[::1] indices,
    double[::1] data,
    cnp.int64_t[::1] dangling,
    double[:, ::1] teleport,
    double damping,
    double tol,
    int max_iters,
):
    """Run power iteration for each teleport row over the transposed
    transition matrix given in CSR form.

    Returns (scores, iterations, converged) with scores shaped like teleport.
    """
    cdef Py_ssize_t m = teleport.shape[0]
    cdef Py_ssize_t n = teleport.shape[1]
    cdef Py_ssize_t n_dang = dangling.shape[0]

    # node-major layout: X[i, p] so the batch dimension is contiguous
    x_arr = np.ascontiguousarray(np.asarray(teleport).T, dtype=np.float64)
    tele_arr = x_arr.copy()
    y_arr = np.empty_like(x_arr)
    cdef double[:, ::1] x = x_arr
    cdef double[:, ::1] tele = tele_arr
    cdef double[:, ::1] y = y_arr

    iters_arr = np.zeros(m, dtype=np.int64)
    conv_arr = np.zeros(m, dtype=np.uint8)
    cdef cnp.int64_t[::1] iters = iters_arr
    cdef cnp.uint8_t[::1] conv = conv_arr

    active_arr = np.arange(m, dtype=np.int64)
    cdef cnp.int64_t[::1] active = active_arr
    cdef Py_ssize_t n_active = m

    dm_arr = np.zeros(m, dtype=np.float64)
    delta_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] dm = dm_arr
    cdef double[::1] delta = delta_arr

    cdef Py_ssize_t i, k, p, a, it, src
    cdef double acc, base, w, yv

    for it in range(max_iters):
        if n_active == 0:
            break
        for a in range(n_active):
            dm[active[a]] = 0.0
        for k in range(n_dang):
            src = dangling[k]
            for a in range(n_active):
                dm[active[a]] += x[src, active[a]]
        for a in range(n_active):
            p = active[a]
            dm[p] = damping * dm[p] / n
            delta[p] = 0.0
        for i in range(n):
            for a in range(n_active):
                y[i, active[a]] = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                src = indices[k]
                w = data[k]
                for a in range(n_active):
                    y[i, active[a]] += w * x[src, active[a]]
            for a in range(n_active):
                p = active[a]
                yv = (1.0 - damping) * tele[i, p] + damping * y[i, p] + dm[p]
                delta[p] += abs(yv - x[i, p])
                y[i, p] = yv
        for i in range(n):
            for a in range(n_active):
                p = active[a]
                x[i, p] = y[i, p]
        # freeze converged columns
        k = 0
        for a in range(n_active):
            p = active[a]
            if delta[p] < tol:
                iters[p] = it + 1
                conv[p] = 1
            else:
                active[k] = p
                k += 1
        n_active = k
    for a in range(n_active):
        iters[active[a]] = max_iters

    return np.ascontiguousarray(x_arr.T), iters_arr, conv_arr.astype(bool)


def propagate_labels(
    cnp.int32_t[::1] indptr,
    cnp.int32_t[::1] indices,
    double[::1] data,
    cnp.int64_t[::1] clamp_indptr,
    cnp.int64_t[::1] clamp_idx,
    double[::1] clamp_val,
    double[:, ::1] seeds,
    int iters,
):
    """Iterate f <- A f with per-row clamping, exactly `iters` times.

    A is a row-normalized adjacency in CSR form; row p of `seeds` is one
    propagation problem with clamps clamp_idx[clamp_indptr[p]:clamp_indptr[p+1]].
    """
    cdef Py_ssize_t m = seeds.shape[0]
    cdef Py_ssize_t n = seeds.shape[1]

    x_arr = np.ascontiguousarray(np.asarray(seeds).T, dtype=np.float64)
    y_arr = np.empty_like(x_arr)
    cdef double[:, ::1] x = x_arr
    cdef double[:, ::1] y = y_arr

    cdef Py_ssize_t i, k, p, it, src
    cdef double w

    for it in range(iters):
        for i in range(n):
            for p in range(m):
                y[i, p] = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                src = indices[k]
                w = data[k]
                for p in range(m):
                    y[i, p] += w * x[src, p]
        for p in range(m):
            for k in range(clamp_indptr[p], clamp_indptr[p + 1]):
                y[clamp_idx[k], p] = clamp_val[k]
        for i in range(n):
            for p in range(m):
                x[i, p] = y[i, p]
    return np.ascontiguousarray(x_arr.T)
