"""Neighborhood models: cosine similarity over +1/-1 rating vectors."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .base import Recommender


def _rating_matrix(train) -> sp.csr_matrix:
    return sp.csr_matrix(
        (train.sentiments.astype(np.float64), (train.users, train.entities)),
        shape=(len(train.user_keys), len(train.graph)),
    )


def _top_k(sims: np.ndarray, k: int, exclude: int) -> np.ndarray:
    """Indices of the k largest positive similarities, ties by index."""
    sims = sims.copy()
    sims[exclude] = 0.0
    candidates = np.flatnonzero(sims > 0)
    if len(candidates) == 0:
        return candidates
    order = sorted(candidates.tolist(), key=lambda i: (-sims[i], i))
    return np.array(order[:k], dtype=np.int64)


class UserKNN(Recommender):
    name = "user-knn"

    def __init__(self, k: int = 20):
        self.k = k

    def fit(self, train, graph=None, rng_seed=0):
        self._bind(train, graph)
        self.R = _rating_matrix(train)
        norms = np.sqrt(np.asarray(self.R.multiply(self.R).sum(axis=1)).ravel())
        self._norms = np.where(norms > 0, norms, 1.0)
        self._zero = norms == 0
        self._cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        return self

    def _neighbors(self, user: int) -> tuple[np.ndarray, np.ndarray]:
        hit = self._cache.get(user)
        if hit is not None:
            return hit
        sims = np.asarray(self.R @ self.R[user].T.todense()).ravel()
        sims /= self._norms * self._norms[user]
        sims[self._zero] = 0.0
        if self._zero[user]:
            sims[:] = 0.0
        top = _top_k(sims, self.k, exclude=user)
        result = (top, sims[top])
        if len(self._cache) > 4096:
            self._cache.clear()
        self._cache[user] = result
        return result

    def score_many(self, user, entities):
        entities = np.asarray(entities, dtype=np.int64)
        top, sims = self._neighbors(user)
        if len(top) == 0:
            return np.zeros(len(entities))
        block = self.R[top][:, entities].toarray()
        return sims @ block


class ItemKNN(Recommender):
    """Item-based CF: a candidate is scored from the k entities most similar
    to it within the user's rated profile."""

    name = "item-knn"

    def __init__(self, k: int = 20):
        self.k = k

    def fit(self, train, graph=None, rng_seed=0):
        self._bind(train, graph)
        self.R = _rating_matrix(train)
        self.Rt = self.R.T.tocsr()
        norms = np.sqrt(np.asarray(self.Rt.multiply(self.Rt).sum(axis=1)).ravel())
        self._norms = np.where(norms > 0, norms, 1.0)
        self._zero = norms == 0
        return self

    def score_many(self, user, entities):
        entities = np.asarray(entities, dtype=np.int64)
        profile = self._train.entities_of(user)
        values = self._train.sentiments_of(user).astype(np.float64)
        out = np.zeros(len(entities))
        if len(profile) == 0:
            return out
        # cosine block: candidates x profile in one sparse product
        sims = np.asarray((self.Rt[entities] @ self.Rt[profile].T).todense())
        sims /= np.outer(self._norms[entities], self._norms[profile])
        sims[self._zero[entities], :] = 0.0
        sims[:, self._zero[profile]] = 0.0
        sims[entities[:, None] == profile[None, :]] = 0.0
        sims[sims <= 0] = 0.0
        if sims.shape[1] > self.k:
            # keep the k largest per row (ties by profile entity id ascending)
            order = np.lexsort((np.broadcast_to(profile, sims.shape), -sims), axis=1)
            keep = np.zeros_like(sims, dtype=bool)
            np.put_along_axis(keep, order[:, : self.k], True, axis=1)
            sims = np.where(keep, sims, 0.0)
        return sims @ values
