"""Personalized-PageRank recommenders over three graph views.

KG: knowledge-graph edges only. COLLAB: bipartite user-rating edges only.
JOINT: the union. Views are undirected for random-walk purposes; seeds are
the entities the user liked in training.
"""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..pagerank import transition_csr
from .base import Recommender

MODES = ("KG", "COLLAB", "JOINT")


class GraphView:
    """Undirected arc multiset over entity nodes (ids 0..n_entities-1) plus,
    for COLLAB/JOINT, user nodes appended after the entities."""

    def __init__(self, mode: str, graph, train=None):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.mode = mode
        self.n_entities = len(graph)
        self.n_users = len(train.user_keys) if mode != "KG" else 0

        src_parts = []
        dst_parts = []
        if mode in ("KG", "JOINT"):
            heads, tails = graph.arc_arrays()
            src_parts += [heads, tails]
            dst_parts += [tails, heads]
        if mode in ("COLLAB", "JOINT"):
            user_nodes = train.users + self.n_entities
            src_parts += [user_nodes, train.entities]
            dst_parts += [train.entities, user_nodes]
        self._src = np.concatenate(src_parts) if src_parts else np.zeros(0, dtype=np.int64)
        self._dst = np.concatenate(dst_parts) if dst_parts else np.zeros(0, dtype=np.int64)

    def __len__(self) -> int:
        return self.n_entities + self.n_users

    def arc_arrays(self):
        return self._src, self._dst


class PPRRecommender(Recommender):
    def __init__(
        self,
        mode: str,
        damping: float = 0.85,
        tol: float = 1e-8,
        max_iters: int = 200,
        chunk: int = 64,
    ):
        self.mode = mode
        self.damping = damping
        self.tol = tol
        self.max_iters = max_iters
        self.chunk = chunk
        self.name = f"ppr-{mode.lower()}"

    def fit(self, train, graph=None, rng_seed=0):
        self._bind(train, graph)
        if self.mode != "COLLAB" and graph is None:
            raise ValueError(f"{self.name} requires the knowledge graph")
        self.view = GraphView(self.mode, train.graph, train)
        n = len(self.view)
        src, dst = self.view.arc_arrays()
        self._csr = transition_csr(src, dst, n)
        self._cache: dict[int, np.ndarray] = {}
        return self

    def _seeds(self, user: int) -> list[int]:
        return self._train.liked(user).tolist()

    def warm_cache(self, users) -> None:
        """Batched PPR for the users' seed sets; replaces the score cache."""
        users = [int(u) for u in users if self._seeds(int(u))]
        if not users:
            return
        self._cache = {}
        n = len(self.view)
        indptr, indices, data, dangling = self._csr
        for start in range(0, len(users), self.chunk):
            block = users[start:start + self.chunk]
            teleport = np.zeros((len(block), n))
            for row, u in enumerate(block):
                seeds = self._seeds(u)
                teleport[row, seeds] = 1.0 / len(seeds)
            scores, _, _ = kernels.pagerank_power(
                indptr, indices, data, dangling, teleport, self.damping, self.tol, self.max_iters
            )
            for row, u in enumerate(block):
                self._cache[u] = scores[row, : self.view.n_entities].copy()

    def _score_vector(self, user: int) -> np.ndarray | None:
        cached = self._cache.get(user)
        if cached is not None:
            return cached
        seeds = self._seeds(user)
        if not seeds:
            return None
        self.warm_cache([user])
        return self._cache.get(user)

    def score_many(self, user, entities):
        entities = np.asarray(entities, dtype=np.int64)
        vec = self._score_vector(int(user))
        if vec is None:
            return np.zeros(len(entities))
        return vec[entities]

    def rank(self, user, candidates, k):
        if not self._seeds(int(user)):
            return []
        return super().rank(user, candidates, k)


def ppr_kg(**kw) -> PPRRecommender:
    return PPRRecommender("KG", **kw)


def ppr_collab(**kw) -> PPRRecommender:
    return PPRRecommender("COLLAB", **kw)


def ppr_joint(**kw) -> PPRRecommender:
    return PPRRecommender("JOINT", **kw)
