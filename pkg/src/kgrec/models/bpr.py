"""Pairwise ranking matrix factorization trained by stochastic gradient
ascent on the log-sigmoid ranking objective."""

from __future__ import annotations

import numpy as np

from ..ratings import LIKE
from .base import Recommender


def sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))


def pairwise_loss_and_grad(p_u, q_i, q_j, reg):
    """Regularized pairwise loss -ln s(p.(qi-qj)) + reg*(|p|^2+|qi|^2+|qj|^2)
    and its analytic gradients. Shared by training and the gradient tests."""
    x = p_u @ (q_i - q_j)
    s = sigmoid(-x)  # = 1 - s(x), the slope factor of -ln s(x)
    loss = -np.log(sigmoid(x)) + reg * (p_u @ p_u + q_i @ q_i + q_j @ q_j)
    g_p = -s * (q_i - q_j) + 2.0 * reg * p_u
    g_i = -s * p_u + 2.0 * reg * q_i
    g_j = s * p_u + 2.0 * reg * q_j
    return loss, (g_p, g_i, g_j)


class BPR(Recommender):
    name = "bpr"

    def __init__(self, d: int = 32, lr: float = 0.05, reg: float = 0.002, epochs: int = 30, batch_size: int = 1024):
        self.d = d
        self.lr = lr
        self.reg = reg
        self.epochs = epochs
        self.batch_size = batch_size

    def fit(self, train, graph=None, rng_seed=0):
        self._bind(train, graph)
        rng = np.random.default_rng(rng_seed)
        n_users = len(train.user_keys)
        n_entities = len(train.graph)
        self.P = rng.normal(0.0, 0.1, (n_users, self.d))
        self.Q = rng.normal(0.0, 0.1, (n_entities, self.d))

        pos_mask = train.sentiments == LIKE
        pos_users = train.users[pos_mask]
        pos_items = train.entities[pos_mask]
        if len(pos_users) == 0:
            return self

        rec_mask = train.graph.recommendable_mask
        rec_ids = train.graph.recommendable_ids
        n_rec = len(rec_ids)
        rated_by_user: dict[int, set[int]] = {}
        disliked_by_user: dict[int, np.ndarray] = {}
        n_unrated_rec: dict[int, int] = {}
        for u in train.present_users.tolist():
            rated = set(train.entities_of(u).tolist())
            rated_by_user[u] = rated
            disliked_by_user[u] = train.disliked(u)
            n_unrated_rec[u] = n_rec - sum(1 for e in rated if rec_mask[e])

        n_samples = len(pos_users)
        for _ in range(self.epochs):
            draw = rng.integers(0, n_samples, n_samples)
            for start in range(0, n_samples, self.batch_size):
                sel = draw[start:start + self.batch_size]
                u = pos_users[sel]
                i = pos_items[sel]
                j = self._negatives(
                    u, rated_by_user, disliked_by_user, n_unrated_rec, rec_ids, rng
                )
                self._step(u, i, j)
        return self

    def _negatives(self, users, rated_by_user, disliked_by_user, n_unrated_rec, rec_ids, rng):
        """Negative j drawn uniformly from disliked(u) union unrated
        recommendables (rejection sampling for the unrated part)."""
        n_rec = len(rec_ids)
        out = np.empty(len(users), dtype=np.int64)
        for row, u in enumerate(users.tolist()):
            disliked = disliked_by_user[u]
            total = len(disliked) + n_unrated_rec[u]
            if total == 0:
                # Degenerate: user rated every recommendable and disliked none.
                out[row] = int(rec_ids[rng.integers(0, n_rec)])
                continue
            pick = int(rng.integers(0, total))
            if pick < len(disliked):
                out[row] = disliked[pick]
            else:
                rated = rated_by_user[u]
                while True:
                    cand = int(rec_ids[rng.integers(0, n_rec)])
                    if cand not in rated:
                        out[row] = cand
                        break
        return out

    def _step(self, u, i, j):
        p = self.P[u]
        qi = self.Q[i]
        qj = self.Q[j]
        x = np.einsum("ij,ij->i", p, qi - qj)
        s = sigmoid(-x)[:, None]
        g_p = -s * (qi - qj) + 2.0 * self.reg * p
        g_i = -s * p + 2.0 * self.reg * qi
        g_j = s * p + 2.0 * self.reg * qj
        np.add.at(self.P, u, -self.lr * g_p)
        np.add.at(self.Q, i, -self.lr * g_i)
        np.add.at(self.Q, j, -self.lr * g_j)

    def score_many(self, user, entities):
        entities = np.asarray(entities, dtype=np.int64)
        return self.Q[entities] @ self.P[user]
