"""Pure NumPy/SciPy fallbacks for the compiled kernels.

Kept semantically identical to kgrec.kernels._compiled: same update order,
same per-column convergence freezing, so both backends produce matching
scores.
"""

import numpy as np
import scipy.sparse as sp


def _as_csr(indptr, indices, data, n):
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def pagerank_power(indptr, indices, data, dangling, teleport, damping, tol, max_iters):
    m, n = teleport.shape
    mat = _as_csr(indptr, indices, data, n)
    x = np.ascontiguousarray(teleport.T, dtype=np.float64)  # node-major (n, m)
    tele = x.copy()
    iters = np.zeros(m, dtype=np.int64)
    conv = np.zeros(m, dtype=bool)
    active = np.arange(m)
    for it in range(max_iters):
        if len(active) == 0:
            break
        xa = x[:, active]
        dm = xa[dangling].sum(axis=0) if len(dangling) else np.zeros(len(active))
        y = (1.0 - damping) * tele[:, active] + damping * (mat @ xa) + damping * dm / n
        delta = np.abs(y - xa).sum(axis=0)
        x[:, active] = y
        done = delta < tol
        iters[active[done]] = it + 1
        conv[active[done]] = True
        active = active[~done]
    iters[active] = max_iters
    return np.ascontiguousarray(x.T), iters, conv


def propagate_labels(indptr, indices, data, clamp_indptr, clamp_idx, clamp_val, seeds, iters):
    m, n = seeds.shape
    mat = _as_csr(indptr, indices, data, n)
    x = np.ascontiguousarray(seeds.T, dtype=np.float64)  # node-major (n, m)
    for _ in range(iters):
        x = mat @ x
        for p in range(m):
            idx = clamp_idx[clamp_indptr[p]:clamp_indptr[p + 1]]
            x[idx, p] = clamp_val[clamp_indptr[p]:clamp_indptr[p + 1]]
    return np.ascontiguousarray(x.T)
