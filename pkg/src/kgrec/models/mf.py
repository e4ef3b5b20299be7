"""Matrix factorization on +1/-1 ratings, trained with alternating exact
least-squares solves."""

from __future__ import annotations

import numpy as np

from .base import Recommender


class AlsMF(Recommender):
    name = "mf"

    def __init__(self, d: int = 32, reg: float = 0.1, epochs: int = 20):
        if d < 1:
            raise ValueError("d must be >= 1")
        self.d = d
        self.reg = reg
        self.epochs = epochs

    def fit(self, train, graph=None, rng_seed=0):
        self._bind(train, graph)
        rng = np.random.default_rng(rng_seed)
        n_users = len(train.user_keys)
        n_entities = len(train.graph)
        d = self.d
        self.P = rng.normal(0.0, 0.1, (n_users, d))
        self.Q = rng.normal(0.0, 0.1, (n_entities, d))

        users = train.users
        entities = train.entities
        r = train.sentiments.astype(np.float64)
        by_user = _group(users, n_users)
        by_entity = _group(entities, n_entities)
        # Factors of users/entities without observations carry no signal.
        self.P[np.setdiff1d(np.arange(n_users), np.unique(users))] = 0.0
        self.Q[np.setdiff1d(np.arange(n_entities), np.unique(entities))] = 0.0

        self.objective_trace = [self._objective(users, entities, r)]
        eye = self.reg * np.eye(d)
        for _ in range(self.epochs):
            for u, idx in enumerate(by_user):
                if len(idx) == 0:
                    continue
                q = self.Q[entities[idx]]
                self.P[u] = np.linalg.solve(q.T @ q + eye, q.T @ r[idx])
            self.objective_trace.append(self._objective(users, entities, r))
            for e, idx in enumerate(by_entity):
                if len(idx) == 0:
                    continue
                p = self.P[users[idx]]
                self.Q[e] = np.linalg.solve(p.T @ p + eye, p.T @ r[idx])
            self.objective_trace.append(self._objective(users, entities, r))
        return self

    def _objective(self, users, entities, r) -> float:
        pred = np.einsum("ij,ij->i", self.P[users], self.Q[entities])
        sq = float(((r - pred) ** 2).sum())
        return sq + self.reg * (float((self.P**2).sum()) + float((self.Q**2).sum()))

    def score_many(self, user, entities):
        entities = np.asarray(entities, dtype=np.int64)
        return self.Q[entities] @ self.P[user]


def _group(keys: np.ndarray, n: int) -> list[np.ndarray]:
    order = np.argsort(keys, kind="stable")
    bounds = np.searchsorted(keys[order], np.arange(n + 1))
    return [order[bounds[i]:bounds[i + 1]] for i in range(n)]
