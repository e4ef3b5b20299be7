"""Translational embeddings over the rating graph, optionally extended with
the knowledge graph's triples. Margin ranking loss with one corrupted
head-or-tail negative per positive; entity vectors projected to the unit ball
after each epoch.

The per-pair loss/gradient helpers are shared by training and the
finite-difference gradient tests.
"""

from __future__ import annotations

import numpy as np

from ..ratings import LIKE
from .base import Recommender

EPS = 1e-12

LIKES_REL = 0
DISLIKES_REL = 1


def translation_pair_loss(h, r, t, hn, tn, margin):
    """Margin loss of one (positive, corrupted) pair under plain translation
    distance, with analytic gradients for (h, r, t, hn, tn)."""
    u = h + r - t
    v = hn + r - tn
    d1 = np.linalg.norm(u)
    d2 = np.linalg.norm(v)
    loss = margin + d1 - d2
    if loss <= 0:
        z = np.zeros_like(h)
        return 0.0, (z, z.copy(), z.copy(), z.copy(), z.copy())
    gu = u / max(d1, EPS)
    gv = v / max(d2, EPS)
    return float(loss), (gu, gu - gv, -gu, -gv, gv)


def hyperplane_pair_loss(h, r, t, hn, tn, w, margin):
    """Margin loss with heads/tails projected onto the relation hyperplane
    (normal w); returns gradients for (h, r, t, hn, tn, w)."""
    def project(x):
        return x - (w @ x) * w

    u = project(h) + r - project(t)
    v = project(hn) + r - project(tn)
    d1 = np.linalg.norm(u)
    d2 = np.linalg.norm(v)
    loss = margin + d1 - d2
    if loss <= 0:
        z = np.zeros_like(h)
        return 0.0, (z, z.copy(), z.copy(), z.copy(), z.copy(), z.copy())
    gu = u / max(d1, EPS)
    gv = v / max(d2, EPS)

    def through_projection(g):
        return g - (w @ g) * w

    # d/dw of || (h-t) + r + (w.(t-h))w ||
    def w_part(g, head, tail):
        diff = tail - head
        return (g @ w) * diff + (w @ diff) * g

    g_h = through_projection(gu)
    g_t = -through_projection(gu)
    g_hn = -through_projection(gv)
    g_tn = through_projection(gv)
    g_r = gu - gv
    g_w = w_part(gu, h, t) - w_part(gv, hn, tn)
    return float(loss), (g_h, g_r, g_t, g_hn, g_tn, g_w)


class TransBase(Recommender):
    hyperplane = False

    def __init__(
        self,
        kg_mode: bool = False,
        d: int = 32,
        margin: float = 1.0,
        lr: float = 0.01,
        epochs: int = 30,
        batch_size: int = 1024,
    ):
        self.kg_mode = kg_mode
        self.d = d
        self.margin = margin
        self.lr = lr
        self.epochs = epochs
        self.batch_size = batch_size

    def fit(self, train, graph=None, rng_seed=0):
        self._bind(train, graph)
        if self.kg_mode and graph is None:
            raise ValueError("kg_mode requires the knowledge graph")
        rng = np.random.default_rng(rng_seed)
        n_users = len(train.user_keys)
        n_entities = len(train.graph)
        self.n_users = n_users
        n_nodes = n_users + n_entities

        relations = [LIKES_REL, DISLIKES_REL]
        rel_names = {"__likes__": LIKES_REL, "__dislikes__": DISLIKES_REL}
        if self.kg_mode:
            for name in sorted(set(graph.relations)):
                rel_names[name] = len(rel_names)
            relations = list(range(len(rel_names)))
        n_rel = len(relations)

        heads = [train.users, ]
        rels = [np.where(train.sentiments == LIKE, LIKES_REL, DISLIKES_REL)]
        tails = [train.entities + n_users]
        if self.kg_mode:
            g_heads, g_tails = graph.arc_arrays()
            heads.append(g_heads + n_users)
            tails.append(g_tails + n_users)
            rels.append(
                np.array([rel_names[e.relation] for e in graph.edges], dtype=np.int64)
            )
        heads = np.concatenate(heads)
        rels = np.concatenate(rels)
        tails = np.concatenate(tails)

        bound = 6.0 / np.sqrt(self.d)
        self.E = rng.uniform(-bound, bound, (n_nodes, self.d))
        self.R = rng.uniform(-bound, bound, (n_rel, self.d))
        self.R /= np.maximum(np.linalg.norm(self.R, axis=1, keepdims=True), EPS)
        if self.hyperplane:
            self.W = rng.uniform(-bound, bound, (n_rel, self.d))
            self.W /= np.maximum(np.linalg.norm(self.W, axis=1, keepdims=True), EPS)

        self._project_entities()
        n_triples = len(heads)
        self.loss_trace: list[float] = []
        for _ in range(self.epochs):
            perm = rng.permutation(n_triples)
            epoch_loss = 0.0
            for start in range(0, n_triples, self.batch_size):
                sel = perm[start:start + self.batch_size]
                h, r, t = heads[sel], rels[sel], tails[sel]
                corrupt_head = rng.random(len(sel)) < 0.5
                replacement = rng.integers(0, n_nodes, len(sel))
                hn = np.where(corrupt_head, replacement, h)
                tn = np.where(corrupt_head, t, replacement)
                epoch_loss += self._batch_step(h, r, t, hn, tn)
            self.loss_trace.append(epoch_loss / n_triples)
            self._project_entities()
        return self

    def _project_entities(self):
        norms = np.linalg.norm(self.E, axis=1, keepdims=True)
        self.E /= np.maximum(norms, 1.0)

    def _batch_step(self, h, r, t, hn, tn) -> float:
        eh, er, et = self.E[h], self.R[r], self.E[t]
        ehn, etn = self.E[hn], self.E[tn]
        if self.hyperplane:
            w = self.W[r]
            proj = lambda x: x - np.einsum("ij,ij->i", w, x)[:, None] * w
            u = proj(eh) + er - proj(et)
            v = proj(ehn) + er - proj(etn)
        else:
            u = eh + er - et
            v = ehn + er - etn
        d1 = np.maximum(np.linalg.norm(u, axis=1), EPS)
        d2 = np.maximum(np.linalg.norm(v, axis=1), EPS)
        active = (self.margin + d1 - d2) > 0
        if not active.any():
            return 0.0
        total = float(np.maximum(self.margin + d1 - d2, 0.0).sum())
        idx = np.flatnonzero(active)
        gu = u[idx] / d1[idx, None]
        gv = v[idx] / d2[idx, None]
        lr = self.lr

        if self.hyperplane:
            wa = self.W[r[idx]]
            back = lambda g: g - np.einsum("ij,ij->i", wa, g)[:, None] * wa
            g_h = back(gu)
            g_t = -back(gu)
            g_hn = -back(gv)
            g_tn = back(gv)
            diff_pos = self.E[t[idx]] - self.E[h[idx]]
            diff_neg = self.E[tn[idx]] - self.E[hn[idx]]
            g_w = (
                np.einsum("ij,ij->i", gu, wa)[:, None] * diff_pos
                + np.einsum("ij,ij->i", wa, diff_pos)[:, None] * gu
                - np.einsum("ij,ij->i", gv, wa)[:, None] * diff_neg
                - np.einsum("ij,ij->i", wa, diff_neg)[:, None] * gv
            )
            np.add.at(self.W, r[idx], -lr * g_w)
            self.W /= np.maximum(np.linalg.norm(self.W, axis=1, keepdims=True), EPS)
        else:
            g_h = gu
            g_t = -gu
            g_hn = -gv
            g_tn = gv
        np.add.at(self.E, h[idx], -lr * g_h)
        np.add.at(self.E, t[idx], -lr * g_t)
        np.add.at(self.E, hn[idx], -lr * g_hn)
        np.add.at(self.E, tn[idx], -lr * g_tn)
        np.add.at(self.R, r[idx], -lr * (gu - gv))
        return total

    def score_many(self, user, entities):
        entities = np.asarray(entities, dtype=np.int64)
        p = self.E[user]
        if self.hyperplane:
            w = self.W[LIKES_REL]
            p = p - (w @ p) * w
            q = self.E[entities + self.n_users]
            q = q - (q @ w)[:, None] * w
        else:
            q = self.E[entities + self.n_users]
        diff = p + self.R[LIKES_REL] - q
        return -np.linalg.norm(diff, axis=1)


class TransE(TransBase):
    name = "transe"
    hyperplane = False


class TransH(TransBase):
    name = "transh"
    hyperplane = True
