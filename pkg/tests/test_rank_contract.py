"""Contract properties every model must satisfy: tie rule, purity, and
argmax invariance under positive score scaling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgrec.models import ALL_MODEL_NAMES, build_model
from kgrec.models.base import Recommender

from .conftest import build_kg, make_store


@pytest.fixture(scope="module")
def world():
    rng = np.random.default_rng(0)
    entities = [(f"m{i:02d}", "Movie") for i in range(12)]
    entities += [(f"g{i}", "Genre") for i in range(3)]
    triples = [(f"m{i:02d}", "HAS_GENRE", f"g{i % 3}") for i in range(12)]
    graph = build_kg(entities, triples)
    rows = []
    for u in range(6):
        for m in rng.choice(12, size=5, replace=False):
            rows.append((f"u{u}", f"m{m:02d}", int(rng.choice([1, -1], p=[0.7, 0.3]))))
    # make sure user 0 has at least one like
    rows.append(("u0", "m11", 1)) if ("u0", "m11", 1) not in rows else None
    rows = list(dict.fromkeys((u, m) for u, m, _ in rows))
    rng = np.random.default_rng(1)
    rows = [(u, m, int(rng.choice([1, -1], p=[0.7, 0.3]))) for u, m in rows]
    store = make_store(graph, rows)
    return graph, store


SMALL_PARAMS = {
    "mf": dict(d=4, epochs=3),
    "bpr": dict(d=4, epochs=3),
    "transe": dict(d=4, epochs=3),
    "transe-kg": dict(d=4, epochs=3),
    "transh": dict(d=4, epochs=3),
    "transh-kg": dict(d=4, epochs=3),
}


@pytest.fixture(scope="module")
def fitted_models(world):
    graph, store = world
    out = {}
    for name in ALL_MODEL_NAMES:
        model = build_model(name, **SMALL_PARAMS.get(name, {}))
        out[name] = model.fit(store, graph, rng_seed=0)
    return out


def test_rank_is_pure(world, fitted_models):
    graph, store = world
    cands = graph.recommendable_ids.tolist()
    for name, model in fitted_models.items():
        first = model.rank(0, cands, 10)
        for _ in range(3):
            assert model.rank(0, cands, 10) == first, name


def test_rank_subset_length_and_order(world, fitted_models):
    graph, store = world
    cands = graph.recommendable_ids.tolist()[:7]
    for name, model in fitted_models.items():
        out = model.rank(0, cands, 5)
        assert set(out) <= set(cands), name
        assert len(out) == min(5, len(cands)) or out == [], name
        scores = {e: model.score(0, e) for e in out}
        for a, b in zip(out, out[1:]):
            if scores[a] == scores[b]:
                assert graph.uris[a] < graph.uris[b], name
            else:
                assert scores[a] > scores[b], name


class ScaledScores(Recommender):
    """Harness wrapping a fitted model with positively scaled scores."""

    def __init__(self, inner, factor):
        self.inner = inner
        self.factor = factor
        self._uris = inner._uris

    def score_many(self, user, entities):
        return self.factor * self.inner.score_many(user, entities)

    def rank(self, user, candidates, k):
        if hasattr(self.inner, "_seeds") and not self.inner._seeds(int(user)):
            return []
        return Recommender.rank(self, user, candidates, k)


def test_argmax_invariance_under_positive_scaling(world, fitted_models):
    graph, store = world
    cands = graph.recommendable_ids.tolist()
    for name, model in fitted_models.items():
        base = model.rank(0, cands, 10)
        for factor in (0.5, 3.0, 1e6):
            assert ScaledScores(model, factor).rank(0, cands, 10) == base, name


class FixedScores(Recommender):
    def __init__(self, uris, table):
        self._uris = uris
        self.table = table

    def score_many(self, user, entities):
        return np.array([self.table[int(e)] for e in entities])


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_tie_rule_adversarial_equal_scores(data):
    n = data.draw(st.integers(min_value=2, max_value=12))
    uris = np.array([f"e{i:03d}" for i in range(n)], dtype=object)
    # adversarial: many duplicate score levels
    levels = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    table = {i: float(levels[i]) for i in range(n)}
    model = FixedScores(uris, table)
    perm = data.draw(st.permutations(list(range(n))))
    k = data.draw(st.integers(min_value=1, max_value=n))
    out = model.rank(0, perm, k)
    expected = sorted(range(n), key=lambda e: (-table[e], uris[e]))[:k]
    assert out == expected
