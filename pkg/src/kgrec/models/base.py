"""Uniform recommender contract shared by the twelve models."""

from __future__ import annotations

import numpy as np

from ..graph import KnowledgeGraph
from ..ratings import RatingStore


class Recommender:
    """fit/score/rank contract.

    ``rank`` orders candidates by score descending with ties broken by entity
    uri ascending, and returns at most k ids. Fitted models are immutable and
    safe for concurrent scoring.
    """

    name = "recommender"

    def fit(self, train: RatingStore, graph: KnowledgeGraph | None = None, rng_seed: int = 0) -> "Recommender":
        raise NotImplementedError

    def score(self, user: int, entity: int) -> float:
        return float(self.score_many(user, np.array([entity]))[0])

    def score_many(self, user: int, entities: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def rank(self, user: int, candidates, k: int) -> list[int]:
        candidates = np.asarray(list(candidates), dtype=np.int64)
        if len(candidates) == 0:
            return []
        scores = self.score_many(user, candidates)
        uris = self._uris[candidates]
        order = sorted(range(len(candidates)), key=lambda i: (-scores[i], uris[i]))
        return [int(candidates[i]) for i in order[: min(k, len(candidates))]]

    def warm_cache(self, users) -> None:
        """Optional bulk-precompute hook; evaluators call it in user chunks."""

    def _bind(self, train: RatingStore, graph: KnowledgeGraph | None) -> None:
        self._train = train
        self._graph = graph
        self._uris = train.graph.uris
