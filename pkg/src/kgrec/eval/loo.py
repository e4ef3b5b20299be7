"""Leave-one-out split construction with optional top-popular exclusion."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..ratings import LIKE, MR_BIN, RatingStore


@dataclass
class LooSplit:
    held_out: dict[int, int]
    candidates: dict[int, list[int]]
    train: RatingStore
    excluded_entities: set[int]


def top_popular_entities(store: RatingStore, fraction: float = 0.02) -> set[int]:
    """Most-rated entities covering ``fraction`` of the rated-entity set,
    by rating count descending (ties by uri)."""
    counts = store.entity_rating_counts(binary_only=False)
    rated = np.flatnonzero(counts > 0)
    n_top = math.floor(fraction * len(rated))
    ranked = sorted(rated.tolist(), key=lambda e: (-counts[e], store.graph.uris[e]))
    return set(ranked[:n_top])


def build_loo(
    store: RatingStore,
    negatives: int = 99,
    exclude_top_popular: bool = False,
    rng_seed: int = 0,
    top_fraction: float = 0.02,
) -> LooSplit:
    """Per user, hold out one liked recommendable entity and draw unrated
    candidates around it.

    Popularity for the exclusion rule is measured on the full binary store
    before splitting. Users whose liked movies are all excluded (or who liked
    none) stay in training but are absent from the test set. ``negatives=0``
    ranks against every unrated recommendable.
    """
    if store.variant != MR_BIN:
        raise ValueError("build_loo expects an MR_BIN store")
    rng = np.random.default_rng(rng_seed)
    excluded = top_popular_entities(store, top_fraction) if exclude_top_popular else set()

    graph = store.graph
    rec_ids = graph.recommendable_ids
    held_out: dict[int, int] = {}
    candidates: dict[int, list[int]] = {}
    drop_rows = np.zeros(len(store), dtype=bool)

    for u in store.present_users.tolist():
        sl = store.user_slice(u)
        ents = store.entities[sl]
        sents = store.sentiments[sl]
        liked_movies = ents[(sents == LIKE) & store.is_item[sl]]
        eligible = [e for e in liked_movies.tolist() if e not in excluded]
        if not eligible:
            continue
        pick = int(eligible[rng.integers(0, len(eligible))])
        held_out[u] = pick

        rated = set(ents.tolist())
        unrated = rec_ids[~np.isin(rec_ids, list(rated))]
        if negatives == 0:
            negs = unrated.tolist()
        else:
            if negatives > len(unrated):
                warnings.warn(
                    f"user {u}: only {len(unrated)} unrated recommendables for "
                    f"{negatives} negatives; clamping",
                    RuntimeWarning,
                    stacklevel=2,
                )
            take = min(negatives, len(unrated))
            negs = unrated[rng.choice(len(unrated), size=take, replace=False)].tolist()
        candidates[u] = [pick] + negs

        row = sl.start + int(np.flatnonzero(ents == pick)[0])
        drop_rows[row] = True

    train = store.filter(~drop_rows)
    return LooSplit(held_out=held_out, candidates=candidates, train=train, excluded_entities=excluded)
