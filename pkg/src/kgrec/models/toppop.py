"""Most-rated recommendable entity baseline."""

from __future__ import annotations

import numpy as np

from .base import Recommender


class TopPop(Recommender):
    name = "toppop"

    def fit(self, train, graph=None, rng_seed=0):
        self._bind(train, graph)
        counts = np.bincount(train.entities, minlength=len(train.graph)).astype(np.float64)
        counts[~train.graph.recommendable_mask] = 0.0
        self.counts = counts
        return self

    def score_many(self, user, entities):
        return self.counts[np.asarray(entities, dtype=np.int64)]
