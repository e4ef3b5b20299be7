"""Entity-selection procedures for the interview.

Covers popularity-recency movie sampling, type-stratified PageRank-weighted
exploration sampling, and recommendation-phase candidate selection. All
samplers are pure functions of their inputs plus a caller-supplied
numpy Generator, so they are deterministic per seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import KnowledgeGraph
from .pagerank import PageRankScores

MIN_RELEASE_YEAR = 1870


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class MovieMeta:
    entity: int
    external_rating_count: int
    release_year: int


def load_popularity(path: str | Path, graph: KnowledgeGraph, current_year: int = 2026) -> dict[int, MovieMeta]:
    """Load the auxiliary popularity file: ``entity_uri,external_rating_count,release_year``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    meta: dict[int, MovieMeta] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != [
            "entity_uri",
            "external_rating_count",
            "release_year",
        ]:
            raise SamplingError(f"{path}:1: bad popularity header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise SamplingError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            uri, count_s, year_s = (c.strip() for c in row)
            eid = graph.id_of(uri)
            count = int(count_s)
            year = int(year_s)
            if count < 0:
                raise SamplingError(f"{path}:{lineno}: negative rating count")
            if not MIN_RELEASE_YEAR <= year <= current_year:
                raise SamplingError(f"{path}:{lineno}: release year {year} out of range")
            meta[eid] = MovieMeta(eid, count, year)
    return meta


def movie_weight(meta: MovieMeta, reference_year: int = 2000) -> float:
    """Popularity-recency weight: external count times a recency factor that
    clamps to 1 for releases at or before the reference year."""
    if meta.external_rating_count < 0:
        raise SamplingError("external_rating_count must be >= 0")
    return float(meta.external_rating_count) * max(1, meta.release_year - reference_year)


def weighted_sample(
    pool: list[tuple[int, float]], n: int, rng: np.random.Generator
) -> list[int]:
    """Draw up to n distinct ids with probability proportional to weight,
    without replacement (renormalizing after each draw).

    Zero-weight ids are never drawn; if fewer than n ids have positive weight
    all of them are returned. Raises on an all-zero pool.
    """
    if n < 1:
        raise SamplingError("n must be >= 1")
    ids = np.array([i for i, _ in pool], dtype=np.int64)
    weights = np.array([w for _, w in pool], dtype=np.float64)
    if (weights < 0).any():
        raise SamplingError("weights must be nonnegative")
    positive = weights > 0
    if not positive.any():
        raise SamplingError("all weights are zero")
    ids = ids[positive]
    weights = weights[positive]
    # Exponential-key trick: taking the top-n of log(u)/w is distributionally
    # identical to sequential draws proportional to w without replacement.
    keys = np.log(rng.random(len(ids))) / weights
    take = min(n, len(ids))
    order = np.argsort(-keys, kind="stable")[:take]
    return ids[order].tolist()


def exploration_sample(
    graph: KnowledgeGraph,
    scores: PageRankScores,
    adjacent: set[int] | np.ndarray,
    n: int,
    rng: np.random.Generator,
) -> list[int]:
    """Type-stratified sampling over an adjacency set.

    Groups ``adjacent`` by entity kind, shuffles the group order, then
    round-robins the groups drawing one entity per group per round with
    probability proportional to its global PageRank within the group, without
    replacement, until n entities are collected or every group is exhausted.
    """
    if n < 1:
        raise SamplingError("n must be >= 1")
    adjacent = sorted(int(e) for e in adjacent)
    groups: dict[str, list[int]] = {}
    for eid in adjacent:
        groups.setdefault(str(graph.kinds[eid]), []).append(eid)
    group_order = sorted(groups)
    group_order = [group_order[i] for i in rng.permutation(len(group_order))]
    pools = {k: np.array(groups[k], dtype=np.int64) for k in group_order}

    results: list[int] = []
    while len(results) < n and any(len(p) for p in pools.values()):
        for kind in group_order:
            if len(results) >= n:
                break
            pool = pools[kind]
            if len(pool) == 0:
                continue
            w = scores.scores[pool]
            total = w.sum()
            p = w / total if total > 0 else np.full(len(pool), 1.0 / len(pool))
            pick = int(rng.choice(len(pool), p=p))
            results.append(int(pool[pick]))
            pools[kind] = np.delete(pool, pick)
    return results


def recommendation_candidates(
    graph: KnowledgeGraph,
    scores: PageRankScores,
    liked: set[int],
    n: int,
    rng: np.random.Generator,
    pool_size: int = 25,
    exclude: set[int] | frozenset[int] = frozenset(),
) -> list[int]:
    """Recommendable entities adjacent to the liked set, ranked by number of
    connections into it (ties by PageRank, then uri), truncated to
    ``pool_size`` and then PageRank-weight sampled without replacement."""
    if not liked:
        raise SamplingError("liked set must be non-empty")
    connections: dict[int, int] = {}
    for seed in liked:
        for nb in graph.neighbors(seed, "both"):
            if graph.recommendable_mask[nb] and nb not in exclude:
                connections[nb] = connections.get(nb, 0) + 1
    if not connections:
        return []
    ranked = sorted(
        connections,
        key=lambda e: (-connections[e], -scores.scores[e], graph.uris[e]),
    )[:pool_size]
    pool = [(e, float(scores.scores[e])) for e in ranked]
    return weighted_sample(pool, min(n, len(pool)), rng)
