"""Global and personalized PageRank over directed arc multisets.

Power iteration with uniform teleport (global) or seed-restricted teleport
(personalized); dangling mass is redistributed uniformly over all nodes in
both variants. The hot loop lives in kgrec.kernels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import GraphError, KnowledgeGraph


class EmptySeedSet(ValueError):
    """Personalized PageRank needs at least one seed."""


@dataclass
class PageRankScores:
    damping: float
    scores: np.ndarray
    converged: bool
    iterations: int

    def __getitem__(self, entity_id: int) -> float:
        return float(self.scores[entity_id])

    def top(self, n: int) -> list[int]:
        order = np.argsort(-self.scores, kind="stable")
        return order[:n].tolist()


def transition_csr(sources: np.ndarray, dests: np.ndarray, n: int):
    """CSR of the transposed, out-degree-normalized transition matrix.

    Parallel arcs accumulate weight. Returns (indptr, indices, data, dangling)
    where dangling are node ids with zero out-degree.
    """
    import scipy.sparse as sp

    outdeg = np.bincount(sources, minlength=n).astype(np.float64)
    dangling = np.flatnonzero(outdeg == 0).astype(np.int64)
    if len(sources):
        weights = 1.0 / outdeg[sources]
        mat = sp.coo_matrix((weights, (dests, sources)), shape=(n, n)).tocsr()
        mat.sum_duplicates()
        indptr = mat.indptr.astype(np.int32)
        indices = mat.indices.astype(np.int32)
        data = mat.data.astype(np.float64)
    else:
        indptr = np.zeros(n + 1, dtype=np.int32)
        indices = np.zeros(0, dtype=np.int32)
        data = np.zeros(0, dtype=np.float64)
    return indptr, indices, data, dangling


def _power(view, teleport: np.ndarray, damping: float, tol: float, max_iters: int):
    n = len(view)
    sources, dests = view.arc_arrays()
    indptr, indices, data, dangling = transition_csr(sources, dests, n)
    return kernels.pagerank_power(
        indptr, indices, data, dangling, teleport, damping, tol, max_iters
    )


def global_pagerank(
    graph: KnowledgeGraph,
    damping: float = 0.85,
    tol: float = 1e-8,
    max_iters: int = 200,
) -> PageRankScores:
    """Global PageRank with uniform teleport; cached per parameter set."""
    if len(graph) == 0:
        raise GraphError("global_pagerank requires a non-empty graph")
    key = (damping, tol, max_iters)
    cached = graph._pagerank_cache.get(key)
    if cached is not None:
        return cached
    n = len(graph)
    teleport = np.full((1, n), 1.0 / n)
    scores, iters, conv = _power(graph, teleport, damping, tol, max_iters)
    result = _wrap(scores[0], damping, bool(conv[0]), int(iters[0]))
    graph._pagerank_cache[key] = result
    return result


def personalized_pagerank(
    view,
    seeds,
    damping: float = 0.85,
    tol: float = 1e-8,
    max_iters: int = 200,
) -> PageRankScores:
    """PageRank with teleport uniform over ``seeds``; otherwise identical to
    the global iteration (including dangling handling and convergence rule)."""
    scores, iters, conv = personalized_pagerank_batch(
        view, [seeds], damping=damping, tol=tol, max_iters=max_iters
    )
    return _wrap(scores[0], damping, bool(conv[0]), int(iters[0]))


def personalized_pagerank_batch(
    view,
    seed_sets,
    damping: float = 0.85,
    tol: float = 1e-8,
    max_iters: int = 200,
):
    """Batched PPR: one teleport row per seed set. Returns raw kernel output."""
    n = len(view)
    teleport = np.zeros((len(seed_sets), n))
    for row, seeds in enumerate(seed_sets):
        seeds = list(seeds)
        if not seeds:
            raise EmptySeedSet("personalized PageRank requires a non-empty seed set")
        for s in seeds:
            if not 0 <= s < n:
                raise GraphError(f"seed id {s} not in view of size {n}")
        teleport[row, seeds] = 1.0 / len(seeds)
    scores, iters, conv = _power(view, teleport, damping, tol, max_iters)
    if not conv.all():
        warnings.warn(
            f"PageRank did not converge within {max_iters} iterations for "
            f"{int((~conv).sum())} seed set(s)",
            RuntimeWarning,
            stacklevel=2,
        )
    return scores, iters, conv


def _wrap(scores: np.ndarray, damping: float, converged: bool, iterations: int) -> PageRankScores:
    if not converged:
        warnings.warn(
            f"PageRank did not converge within {iterations} iterations",
            RuntimeWarning,
            stacklevel=3,
        )
    return PageRankScores(damping=damping, scores=scores, converged=converged, iterations=iterations)
