import numpy as np
import pytest

from kgrec.graph import Edge, Entity, KnowledgeGraph, load_graph
from kgrec.ratings import load_ratings
from kgrec.sampling import MovieMeta


def write_kg(tmp_path, entities, triples, relations=None):
    """Write entity/triple CSVs (+ relation sidecar) and return their paths.

    entities: (uri, name, kind, recommendable) tuples; triples: (head, rel, tail).
    """
    ent = tmp_path / "entities.csv"
    tri = tmp_path / "triples.csv"
    ent.write_text(
        "uri,name,kind,recommendable\n"
        + "".join(f"{u},{n},{k},{'true' if r else 'false'}\n" for u, n, k, r in entities)
    )
    tri.write_text(
        "head_uri,relation,tail_uri\n" + "".join(f"{h},{r},{t}\n" for h, r, t in triples)
    )
    rels = relations or sorted({r for _, r, _ in triples}) or ["HAS_GENRE"]
    (tmp_path / "triples.csv.relations").write_text("\n".join(rels) + "\n")
    return ent, tri


def build_kg(entities, triples):
    """Construct a KnowledgeGraph in memory: entities as (uri, kind) or
    (uri, name, kind); triples as (head_uri, rel, tail_uri)."""
    objs = []
    for i, spec in enumerate(entities):
        if len(spec) == 2:
            uri, kind = spec
            name = uri
        else:
            uri, name, kind = spec
        objs.append(Entity(i, uri, name, kind, kind == "Movie"))
    by_uri = {e.uri: e.id for e in objs}
    edges = [Edge(by_uri[h], r, by_uri[t]) for h, r, t in triples]
    relations = tuple(sorted({r for _, r, _ in triples})) or ("HAS_GENRE",)
    return KnowledgeGraph(objs, edges, relations)


TINY_ENTITIES = [
    ("m1", "First Contact", "Movie", True),
    ("m2", "Night Harbor", "Movie", True),
    ("m3", "Glass River", "Movie", True),
    ("m4", "Red Summit", "Movie", True),
    ("m5", "The Long Quiet", "Movie", True),
    ("g1", "Drama", "Genre", False),
    ("g2", "Historical Drama", "Genre", False),
    ("g3", "Comedy", "Genre", False),
]

TINY_TRIPLES = [
    ("m1", "HAS_GENRE", "g1"),
    ("m1", "HAS_GENRE", "g2"),
    ("m2", "HAS_GENRE", "g1"),
    ("m3", "HAS_GENRE", "g2"),
    ("m4", "HAS_GENRE", "g3"),
    ("m5", "HAS_GENRE", "g3"),
    ("g2", "SUBCLASS_OF", "g1"),
]

TINY_RATINGS = [
    ("u1", "m1", "true", 1),
    ("u1", "g1", "false", 1),
    ("u1", "m2", "true", 0),
    ("u2", "m1", "true", -1),
    ("u2", "g2", "false", 0),
    ("u2", "m4", "true", 1),
]


@pytest.fixture
def tiny_files(tmp_path):
    ent, tri = write_kg(tmp_path, TINY_ENTITIES, TINY_TRIPLES)
    ratings = tmp_path / "ratings.csv"
    ratings.write_text(
        "user_id,entity_uri,is_item,sentiment\n"
        + "".join(f"{u},{e},{i},{s}\n" for u, e, i, s in TINY_RATINGS)
    )
    pop = tmp_path / "popularity.csv"
    pop.write_text(
        "entity_uri,external_rating_count,release_year\n"
        "m1,120,2010\nm2,80,1995\nm3,50,2005\nm4,10,2018\nm5,200,1988\n"
    )
    return {"entities": ent, "triples": tri, "ratings": ratings, "popularity": pop}


@pytest.fixture
def tiny_graph(tiny_files):
    return load_graph(tiny_files["entities"], tiny_files["triples"])


@pytest.fixture
def tiny_store(tiny_files, tiny_graph):
    return load_ratings(tiny_files["ratings"], tiny_graph)


def make_store(graph, rows, variant="MR_BIN"):
    """In-memory RatingStore from (user_key, uri, sentiment) rows."""
    from kgrec.ratings import RatingStore

    keys: list[str] = []
    key_to_id: dict[str, int] = {}
    users, ents, sents, items = [], [], [], []
    for user_key, uri, sentiment in rows:
        uid = key_to_id.setdefault(user_key, len(keys))
        if uid == len(keys):
            keys.append(user_key)
        eid = graph.id_of(uri)
        users.append(uid)
        ents.append(eid)
        sents.append(sentiment)
        items.append(bool(graph.recommendable_mask[eid]))
    return RatingStore(
        np.array(users, dtype=np.int64),
        np.array(ents, dtype=np.int64),
        np.array(sents, dtype=np.int64),
        np.array(items, dtype=bool),
        keys,
        graph,
        variant,
    )


def make_interview_world(rng_seed=0, n_movies=40, n_genres=6, n_people=15):
    """A mid-sized in-memory KG + popularity metadata for interview tests."""
    rng = np.random.default_rng(rng_seed)
    entities = [(f"m{i}", "Movie") for i in range(n_movies)]
    entities += [(f"g{i}", "Genre") for i in range(n_genres)]
    entities += [(f"p{i}", "Person") for i in range(n_people)]
    triples = []
    for i in range(n_movies):
        for g in rng.choice(n_genres, size=2, replace=False):
            triples.append((f"m{i}", "HAS_GENRE", f"g{g}"))
        for p in rng.choice(n_people, size=2, replace=False):
            triples.append((f"m{i}", "STARRING", f"p{p}"))
    graph = build_kg(entities, triples)
    popularity = {}
    for i in range(n_movies):
        eid = graph.id_of(f"m{i}")
        popularity[eid] = MovieMeta(eid, int(rng.integers(1, 300)), int(rng.integers(1960, 2020)))
    return graph, popularity
