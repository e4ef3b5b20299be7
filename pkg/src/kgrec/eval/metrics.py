"""Ranking metrics for single-held-out evaluation."""

from __future__ import annotations

import math


def ndcg_at_k(ranked: list[int], held_out: int, k: int) -> float:
    """Discounted gain of the held-out entity: 1/log2(rank+1) when it appears
    within the top k, else 0. Normalized by construction with one relevant
    entity."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for rank, entity in enumerate(ranked[:k], start=1):
        if entity == held_out:
            return 1.0 / math.log2(rank + 1)
    return 0.0


def hit_at_k(ranked: list[int], held_out: int, k: int) -> bool:
    if k < 1:
        raise ValueError("k must be >= 1")
    return held_out in ranked[:k]


def hit_rate_at_k(ranked_lists: dict[int, list[int]], held_outs: dict[int, int], k: int) -> float:
    """Fraction of users whose held-out entity made their top k."""
    if not held_outs:
        raise ValueError("empty user set")
    hits = sum(1 for u, held in held_outs.items() if hit_at_k(ranked_lists[u], held, k))
    return hits / len(held_outs)


def mean_ndcg_at_k(ranked_lists: dict[int, list[int]], held_outs: dict[int, int], k: int) -> float:
    if not held_outs:
        raise ValueError("empty user set")
    total = sum(ndcg_at_k(ranked_lists[u], held, k) for u, held in held_outs.items())
    return total / len(held_outs)
