"""Semi-supervised label propagation from movie ratings to the rest of the
graph: f <- D^-1 A f with rated nodes clamped, a fixed number of iterations,
threshold at zero."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..ratings import DISLIKE, LIKE, MR_BIN, RatingStore


def _row_normalized_undirected(graph):
    """D^-1 A over the undirected arc multiset, in CSR arrays."""
    heads, tails = graph.arc_arrays()
    src = np.concatenate([heads, tails])
    dst = np.concatenate([tails, heads])
    n = len(graph)
    deg = np.bincount(src, minlength=n).astype(np.float64)
    mat = sp.coo_matrix((1.0 / deg[src], (src, dst)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    return mat.indptr.astype(np.int32), mat.indices.astype(np.int32), mat.data.astype(np.float64)


def label_propagate_batch(
    graph, seed_sets: list[dict[int, int]], iters: int = 10
) -> np.ndarray:
    """Propagate each seed map (entity -> +1/-1) over the undirected graph.

    Returns the raw scores, shape (len(seed_sets), n_entities); callers apply
    the >= 0 threshold."""
    from .. import kernels

    n = len(graph)
    indptr, indices, data = _row_normalized_undirected(graph)
    seeds = np.zeros((len(seed_sets), n))
    clamp_indptr = np.zeros(len(seed_sets) + 1, dtype=np.int64)
    clamp_idx: list[int] = []
    clamp_val: list[float] = []
    for row, mapping in enumerate(seed_sets):
        if not mapping:
            raise ValueError("each seed set needs at least one rated movie")
        for e, v in sorted(mapping.items()):
            seeds[row, e] = float(v)
            clamp_idx.append(e)
            clamp_val.append(float(v))
        clamp_indptr[row + 1] = len(clamp_idx)
    return kernels.propagate_labels(
        indptr,
        indices,
        data,
        clamp_indptr,
        np.array(clamp_idx, dtype=np.int64),
        np.array(clamp_val, dtype=np.float64),
        seeds,
        iters,
    )


def label_propagate(graph, movie_ratings: dict[int, int], iters: int = 10) -> np.ndarray:
    """Predicted labels in {-1, +1} for every entity given one user's movie
    ratings; score >= 0 maps to +1."""
    scores = label_propagate_batch(graph, [movie_ratings], iters)[0]
    return np.where(scores >= 0, 1, -1)


def evaluate_label_propagation(
    store: RatingStore, graph, iters: int = 10
) -> dict[str, float]:
    """Hold out each user's descriptive-entity ratings, propagate from their
    movie ratings, and score the predictions.

    Reports accuracy, the analytic expected accuracy of a weighted-random
    baseline that predicts like with the dataset's like ratio, per-class
    precision/recall, and the mean predicted like share over all entities."""
    if store.variant != MR_BIN:
        raise ValueError("expected an MR_BIN store")
    like_ratio = float((store.sentiments == LIKE).sum()) / max(len(store), 1)

    seed_sets: list[dict[int, int]] = []
    tests: list[tuple[int, np.ndarray, np.ndarray]] = []
    for u in store.present_users.tolist():
        sl = store.user_slice(u)
        ents = store.entities[sl]
        sents = store.sentiments[sl]
        items = store.is_item[sl]
        movie_map = {int(e): int(s) for e, s in zip(ents[items], sents[items])}
        test_ents = ents[~items]
        test_sents = sents[~items]
        if not movie_map or len(test_ents) == 0:
            continue
        tests.append((len(seed_sets), test_ents, test_sents))
        seed_sets.append(movie_map)
    if not seed_sets:
        raise ValueError("no user has both movie and descriptive-entity ratings")

    scores = label_propagate_batch(graph, seed_sets, iters)
    labels = np.where(scores >= 0, 1, -1)

    tp = fp = tn = fn = 0
    for row, test_ents, test_sents in tests:
        pred = labels[row][test_ents]
        tp += int(((pred == LIKE) & (test_sents == LIKE)).sum())
        fp += int(((pred == LIKE) & (test_sents == DISLIKE)).sum())
        tn += int(((pred == DISLIKE) & (test_sents == DISLIKE)).sum())
        fn += int(((pred == DISLIKE) & (test_sents == LIKE)).sum())
    total = tp + fp + tn + fn
    actual_like = (tp + fn) / total
    accuracy = (tp + tn) / total
    # Expected accuracy of predicting like with probability = like_ratio.
    baseline = like_ratio * actual_like + (1.0 - like_ratio) * (1.0 - actual_like)
    predicted_like_share = float((labels == 1).mean())
    return {
        "accuracy": accuracy,
        "weighted_random_accuracy": baseline,
        "like_ratio": like_ratio,
        "predicted_like_share": predicted_like_share,
        "precision_positive": tp / max(tp + fp, 1),
        "recall_positive": tp / max(tp + fn, 1),
        "precision_negative": tn / max(tn + fn, 1),
        "recall_negative": tn / max(tn + fp, 1),
        "n_predictions": float(total),
    }
