"""Dataset analyses: long tail, co-ratings, coverage, sentiment distribution,
and most-frequent entities per answer category. All functions are pure and
deterministic given the store."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import KINDS
from .ratings import DISLIKE, LIKE, MR_ALL, MR_BIN, UNKNOWN, RatingError, RatingStore


def long_tail_report(store: RatingStore) -> list[tuple[float, float]]:
    """Cumulative rating share against popularity percentile.

    Entities with at least one rating are sorted by rating count descending;
    point i is (fraction of rated entities covered, fraction of ratings they
    absorb)."""
    _expect(store, MR_BIN)
    if len(store) == 0:
        raise RatingError("long_tail_report requires a non-empty store")
    counts = store.entity_rating_counts(binary_only=False)
    counts = counts[counts > 0]
    counts = np.sort(counts)[::-1]
    total = counts.sum()
    cum = np.cumsum(counts) / total
    n = len(counts)
    return [((i + 1) / n, float(cum[i])) for i in range(n)]


def share_of_top_fraction(report: list[tuple[float, float]], fraction: float) -> float:
    """Rating share absorbed by the most popular ``fraction`` of rated entities."""
    share = 0.0
    for pct, cum in report:
        if pct <= fraction + 1e-12:
            share = cum
        else:
            break
    return share


def co_rating_histogram(store: RatingStore, entity_class: str) -> dict[int, int]:
    """Histogram of shared-rating counts over unordered user pairs.

    ``entity_class`` selects recommendable or descriptive entities; pairs with
    zero shared rated entities of the class are omitted."""
    _expect(store, MR_BIN)
    if entity_class not in ("recommendable", "descriptive"):
        raise ValueError(f"entity_class must be recommendable/descriptive, got {entity_class!r}")
    if store.n_users < 2:
        raise RatingError("co_rating_histogram requires at least 2 users")
    keep = store.is_item if entity_class == "recommendable" else ~store.is_item
    users = store.users[keep]
    entities = store.entities[keep]
    if len(users) == 0:
        return {}
    # Row index = position of the user in the present-user list.
    present, row = np.unique(users, return_inverse=True)
    mat = sp.csr_matrix(
        (np.ones(len(users)), (row, entities)),
        shape=(len(present), len(store.graph)),
    )
    co = (mat @ mat.T).tocoo()
    hist: dict[int, int] = {}
    for i, j, v in zip(co.row, co.col, co.data):
        if i < j:
            hist[int(v)] = hist.get(int(v), 0) + 1
    return hist


def coverage_report(store: RatingStore, graph=None) -> dict[str, tuple[float, float, float]]:
    """Per-kind fractions (never observed, unknown-only, binary-rated).

    An entity with both unknown and binary observations counts as binary."""
    _expect(store, MR_ALL)
    graph = graph if graph is not None else store.graph
    n = len(graph)
    has_binary = np.zeros(n, dtype=bool)
    has_unknown = np.zeros(n, dtype=bool)
    binary_rows = store.sentiments != UNKNOWN
    has_binary[store.entities[binary_rows]] = True
    has_unknown[store.entities[~binary_rows]] = True
    report: dict[str, tuple[float, float, float]] = {}
    for kind in KINDS:
        ids = graph.ids_of_kind(kind)
        if len(ids) == 0:
            continue
        binary = has_binary[ids]
        unknown_only = has_unknown[ids] & ~binary
        none = ~has_binary[ids] & ~has_unknown[ids]
        total = len(ids)
        report[kind] = (
            float(none.sum()) / total,
            float(unknown_only.sum()) / total,
            float(binary.sum()) / total,
        )
    return report


def sentiment_distribution_by_kind(store: RatingStore) -> dict[str, tuple[float, float, float]]:
    """Mean per-session (like, dislike, unknown) fractions per entity kind.

    One session per user: for each user with ratings on a kind, compute that
    user's sentiment fractions on the kind, then average over those users."""
    _expect(store, MR_ALL)
    kinds = store.graph.kinds[store.entities]
    report: dict[str, tuple[float, float, float]] = {}
    for kind in KINDS:
        mask = kinds == kind
        if not mask.any():
            continue
        users = store.users[mask]
        sents = store.sentiments[mask]
        present, row = np.unique(users, return_inverse=True)
        sums = np.zeros((len(present), 3))
        np.add.at(sums, (row, np.select([sents == LIKE, sents == DISLIKE], [0, 1], 2)), 1.0)
        fractions = sums / sums.sum(axis=1, keepdims=True)
        mean = fractions.mean(axis=0)
        report[kind] = (float(mean[0]), float(mean[1]), float(mean[2]))
    return report


def top_entities_per_sentiment(store: RatingStore, n: int) -> dict[int, list[tuple[int, int]]]:
    """Top-n entities by observation count in each answer category.

    Ties break by entity uri ascending. Keys are the sentiment codes."""
    _expect(store, MR_ALL)
    if n < 1:
        raise ValueError("n must be >= 1")
    out: dict[int, list[tuple[int, int]]] = {}
    for sentiment in (LIKE, DISLIKE, UNKNOWN):
        mask = store.sentiments == sentiment
        counts = np.bincount(store.entities[mask], minlength=len(store.graph))
        rated = np.flatnonzero(counts > 0)
        ranked = sorted(rated.tolist(), key=lambda e: (-counts[e], store.graph.uris[e]))
        out[sentiment] = [(e, int(counts[e])) for e in ranked[:n]]
    return out


def mean_ratings_per_user(store: RatingStore) -> float:
    if store.n_users == 0:
        return 0.0
    return store.n_ratings / store.n_users


def _expect(store: RatingStore, variant: str) -> None:
    if store.variant != variant:
        raise RatingError(f"expected a {variant} store, got {store.variant}")
