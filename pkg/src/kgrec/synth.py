"""Deterministic synthetic snapshot generator.

Builds a movie knowledge graph with an exact, pinned structural profile
(node/edge counts, degree extremes, median, single component) and collects
ratings by running the real three-phase interview over simulated users with
latent preferences. The output files use the workbench's standard schemas, so
everything downstream (stats, models, experiments) runs on them unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import DEFAULT_RELATIONS, Edge, Entity, KnowledgeGraph
from .interview import InterviewConfig, InterviewEngine, Phase
from .ratings import DISLIKE, LIKE, UNKNOWN
from .sampling import MovieMeta


GENERATOR_VERSION = 9


@dataclass
class SynthConfig:
    seed: int = 20260811
    n_movies: int = 4940
    n_people: int = 12977
    n_genres: int = 200
    n_subjects: int = 95
    n_companies: int = 485
    n_decades: int = 10
    target_edges: int = 198452
    hub_degree: int = 4454
    n_users: int = 1174
    target_ratings: int = 102160

    # person degree profile (bulk/knee/tail place the global median at 10)
    bulk_people: int = 9000
    knee_people: int = 1200
    tail_cap: int = 3500
    filler_margin: int = 800

    # latent preference model
    taste_dims: int = 12
    genre_bias: float = 0.5
    genre_bias_spread: float = 0.55
    hub_bias: float = 1.1
    subject_bias: float = 0.45
    subject_bias_spread: float = 0.5
    person_bias: float = 0.35
    company_bias: float = 0.25
    decade_bias_new: float = 0.9
    decade_bias_old: float = -0.25
    movie_genre_weight: float = 0.8
    movie_genre_veto: float = 0.7
    movie_bias: float = 1.55
    movie_decade_weight: float = 0.15
    movie_noise: float = 0.3
    de_noise: float = 0.12

    # familiarity (probability of answering like/dislike instead of unknown);
    # every rate is scaled by a per-user multiplier drawn from
    # [know_user_lo, know_user_hi] so interview lengths vary realistically
    movie_know_base: float = 0.06
    movie_know_span: float = 0.135
    movie_know_power: float = 1.0
    know_genre: float = 0.82
    know_subject: float = 0.74
    know_decade: float = 0.88
    know_person: float = 0.42
    know_company: float = 0.20
    know_user_lo: float = 0.55
    know_user_hi: float = 1.25

    year_lo: int = 1926
    year_hi: int = 2019


DECADE_WEIGHTS = {
    1920: 1, 1930: 2, 1940: 3, 1950: 5, 1960: 8,
    1970: 12, 1980: 18, 1990: 25, 2000: 16, 2010: 10,
}


@dataclass
class _World:
    entities: list[tuple[str, str, str]] = field(default_factory=list)  # uri, name, kind
    triples: list[tuple[str, str, str]] = field(default_factory=list)
    years: dict[str, int] = field(default_factory=dict)
    movie_genres: dict[str, list[str]] = field(default_factory=dict)
    person_movies: dict[str, list[str]] = field(default_factory=dict)


def _zipf_weights(n: int, alpha: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** alpha
    return w / w.sum()


def build_graph_files(cfg: SynthConfig, rng: np.random.Generator) -> _World:
    """Construct the KG with the exact pinned structural profile."""
    w = _World()
    movies = [f"M{i:05d}" for i in range(cfg.n_movies)]
    people = [f"P{i:05d}" for i in range(cfg.n_people)]
    genres = [f"G{i:03d}" for i in range(cfg.n_genres)]
    subjects = [f"S{i:03d}" for i in range(cfg.n_subjects)]
    companies = [f"C{i:03d}" for i in range(cfg.n_companies)]
    decades = [f"D{y}" for y in sorted(DECADE_WEIGHTS)]

    w.entities += [(m, f"Movie {m[1:]}", "Movie") for m in movies]
    w.entities += [(p, f"Person {p[1:]}", "Person") for p in people]
    w.entities += [(g, f"Genre {g[1:]}", "Genre") for g in genres]
    w.entities += [(s, f"Subject {s[1:]}", "Subject") for s in subjects]
    w.entities += [(c, f"Studio {c[1:]}", "Company") for c in companies]
    w.entities += [(d, f"Movies of the {d[1:]}s", "Decade") for d in decades]

    triples: set[tuple[str, str, str]] = set()
    degree: dict[str, int] = {uri: 0 for uri, _, _ in w.entities}

    def add(h: str, rel: str, t: str) -> bool:
        trip = (h, rel, t)
        if trip in triples or h == t:
            return False
        triples.add(trip)
        degree[h] += 1
        degree[t] += 1
        return True

    # release years and decades; every decade gets a floor of movies so thin
    # decades cannot fall under the minimum-degree profile
    decade_keys = sorted(DECADE_WEIGHTS)
    dec_p = np.array([DECADE_WEIGHTS[k] for k in decade_keys], dtype=float)
    dec_p /= dec_p.sum()
    floor_per_decade = 6
    for i, m in enumerate(movies):
        if i < floor_per_decade * len(decade_keys):
            dec = i % len(decade_keys)
        else:
            dec = int(rng.choice(len(decade_keys), p=dec_p))
        base = decade_keys[dec]
        year = int(np.clip(base + rng.integers(0, 10), cfg.year_lo, cfg.year_hi))
        w.years[m] = year
        add(m, "FROM_DECADE", f"D{decade_keys[dec]}")

    # genre hierarchy: 15 root genres, everything else subclasses one of them
    for i, g in enumerate(genres):
        if i >= 15:
            add(g, "SUBCLASS_OF", genres[int(rng.integers(0, 15))])
    for i, s in enumerate(subjects):
        if i >= 10:
            add(s, "SUBCLASS_OF", subjects[int(rng.integers(0, 10))])

    hub = genres[0]
    # floor: every genre/subject reaches a safe degree before popularity draws
    for g in genres[1:]:
        for m in rng.choice(cfg.n_movies, size=11, replace=False):
            add(movies[int(m)], "HAS_GENRE", g)
    for s in subjects:
        for m in rng.choice(cfg.n_movies, size=11, replace=False):
            add(movies[int(m)], "HAS_SUBJECT", s)
    comp_floor = rng.permutation(cfg.n_movies)
    pos = 0
    for c in companies:
        for _ in range(11):
            add(movies[int(comp_floor[pos % cfg.n_movies])], "PRODUCED_BY", c)
            pos += 1

    genre_p = _zipf_weights(cfg.n_genres - 1, 1.05)
    subject_p = _zipf_weights(cfg.n_subjects, 1.05)
    company_p = _zipf_weights(cfg.n_companies, 0.9)
    for m in movies:
        if rng.random() < 0.88:
            add(m, "HAS_GENRE", hub)
        for _ in range(int(rng.integers(2, 4))):
            add(m, "HAS_GENRE", genres[1 + int(rng.choice(cfg.n_genres - 1, p=genre_p))])
        for _ in range(int(rng.integers(1, 3))):
            add(m, "HAS_SUBJECT", subjects[int(rng.choice(cfg.n_subjects, p=subject_p))])
        if rng.random() < 0.4:
            add(m, "PRODUCED_BY", companies[int(rng.choice(cfg.n_companies, p=company_p))])

    # a few sequel chains
    for _ in range(200):
        a, b = rng.integers(0, cfg.n_movies, 2)
        ma, mb = movies[int(a)], movies[int(b)]
        if ma != mb and w.years[ma] < w.years[mb]:
            add(ma, "FOLLOWED_BY", mb)

    # person degrees: bulk 4..9, knee exactly 10, tail solved to the budget
    person_budget = cfg.target_edges - cfg.filler_margin - len(triples)
    n_tail = cfg.n_people - cfg.bulk_people - cfg.knee_people
    bulk_deg = rng.integers(4, 10, cfg.bulk_people)
    tail_budget = person_budget - int(bulk_deg.sum()) - 10 * cfg.knee_people
    if tail_budget < 11 * n_tail:
        raise ValueError("edge budget too small for the tail profile")
    ranks = np.arange(1, n_tail + 1, dtype=float)

    def tail_sum(c: float) -> int:
        return int(np.minimum(11 + np.floor(c / ranks**0.8), cfg.tail_cap).sum())

    lo, hi = 0.0, float(cfg.tail_cap)
    while tail_sum(hi) < tail_budget:
        hi *= 2
    for _ in range(80):
        mid = (lo + hi) / 2
        if tail_sum(mid) < tail_budget:
            lo = mid
        else:
            hi = mid
    tail_deg = np.minimum(11 + np.floor(hi / ranks**0.8), cfg.tail_cap).astype(int)
    # shave the handful of overshoot edges off the largest entries
    overshoot = int(tail_deg.sum()) - tail_budget
    i = 0
    while overshoot > 0:
        if tail_deg[i % n_tail] > 11:
            tail_deg[i % n_tail] -= 1
            overshoot -= 1
        i += 1

    degrees_by_person = np.concatenate([tail_deg, np.full(cfg.knee_people, 10), bulk_deg])
    for idx, p in enumerate(people):
        k = int(degrees_by_person[idx])
        for m in rng.choice(cfg.n_movies, size=k, replace=False):
            rel = "DIRECTED_BY" if rng.random() < 0.15 else "STARRING"
            if not add(movies[int(m)], rel, p):
                # duplicate pair under the drawn relation: flip the relation
                other = "STARRING" if rel == "DIRECTED_BY" else "DIRECTED_BY"
                add(movies[int(m)], other, p)
        w.person_movies[p] = []

    # --- fix-ups toward the exact profile ---------------------------------
    # 1. hub degree to exactly hub_degree
    hub_gap = cfg.hub_degree - degree[hub]
    if hub_gap < 0:
        raise ValueError("hub overshot; lower the hub link probability")
    unlinked = [m for m in movies if (m, "HAS_GENRE", hub) not in triples]
    order = rng.permutation(len(unlinked))
    taken = 0
    for j in order:
        if taken == hub_gap:
            break
        if add(unlinked[int(j)], "HAS_GENRE", hub):
            taken += 1
    if taken != hub_gap:
        raise ValueError("could not reach the hub degree target")

    # 2. exact edge total via movie-movie filler (movies sit far from the
    #    min/median/max thresholds, so these edges cannot disturb them)
    gap = cfg.target_edges - len(triples)
    if gap < 0:
        raise ValueError("construction overshot the edge target")
    attempts = 0
    while gap > 0:
        a, b = rng.integers(0, cfg.n_movies, 2)
        ma, mb = movies[int(a)], movies[int(b)]
        if ma != mb and add(ma, "FOLLOWED_BY", mb):
            gap -= 1
        attempts += 1
        if attempts > 50 * cfg.target_edges:
            raise ValueError("filler loop failed to converge")

    w.triples = sorted(triples)
    for h, rel, t in w.triples:
        if rel == "HAS_GENRE":
            w.movie_genres.setdefault(h, []).append(t)
        elif rel in ("STARRING", "DIRECTED_BY"):
            w.person_movies.setdefault(t, []).append(h)
    return w


def _verify_profile(cfg: SynthConfig, graph: KnowledgeGraph) -> dict:
    from .graph import degree_stats

    stats = degree_stats(graph)
    expected_nodes = (
        cfg.n_movies + cfg.n_people + cfg.n_genres + cfg.n_subjects
        + cfg.n_companies + cfg.n_decades
    )
    problems = []
    if stats.node_count != expected_nodes:
        problems.append(f"nodes {stats.node_count} != {expected_nodes}")
    if stats.edge_count != cfg.target_edges:
        problems.append(f"edges {stats.edge_count} != {cfg.target_edges}")
    if stats.min_degree != 4:
        problems.append(f"min degree {stats.min_degree} != 4")
    if stats.median_degree != 10:
        problems.append(f"median degree {stats.median_degree} != 10")
    if stats.max_degree != cfg.hub_degree:
        problems.append(f"max degree {stats.max_degree} != {cfg.hub_degree}")
    if stats.component_count != 1:
        problems.append(f"{stats.component_count} components")
    if problems:
        raise ValueError("synthetic profile violated: " + "; ".join(problems))
    return {
        "nodes": stats.node_count,
        "edges": stats.edge_count,
        "min_degree": stats.min_degree,
        "median_degree": stats.median_degree,
        "mean_degree": stats.mean_degree,
        "max_degree": stats.max_degree,
        "components": stats.component_count,
        "kind_counts": stats.kind_counts,
    }


class LatentOracle:
    """Per-user latent preferences over the synthetic graph; answers each
    asked entity with like/dislike/unknown, deterministically per (seed,
    user, entity)."""

    def __init__(self, cfg: SynthConfig, graph: KnowledgeGraph, popularity: dict[int, MovieMeta]):
        self.cfg = cfg
        self.graph = graph
        rng = np.random.default_rng([cfg.seed, 7])
        n = len(graph)
        T = cfg.taste_dims
        self.embed = np.zeros((n, T))
        self.bias = np.zeros(n)
        kinds = graph.kinds

        genre_ids = graph.ids_of_kind("Genre")
        for g in genre_ids:
            self.embed[g] = rng.normal(0, 1, T) / np.sqrt(T) * 2.6
        self.bias[genre_ids] = cfg.genre_bias + cfg.genre_bias_spread * rng.normal(0, 1, len(genre_ids))
        hub = min(genre_ids.tolist())
        self.bias[hub] = cfg.hub_bias

        subj_ids = graph.ids_of_kind("Subject")
        for s in subj_ids:
            self.embed[s] = rng.normal(0, 1, T) / np.sqrt(T) * 2.0
        self.bias[subj_ids] = cfg.subject_bias + cfg.subject_bias_spread * rng.normal(0, 1, len(subj_ids))

        dec_ids = sorted(graph.ids_of_kind("Decade").tolist(), key=lambda e: graph.uris[e])
        for rank, d in enumerate(dec_ids):
            frac = rank / max(len(dec_ids) - 1, 1)
            self.bias[d] = cfg.decade_bias_old + frac * (cfg.decade_bias_new - cfg.decade_bias_old)
            self.embed[d] = rng.normal(0, 1, T) / np.sqrt(T) * 1.2

        self.bias[graph.ids_of_kind("Company")] = cfg.company_bias
        for c in graph.ids_of_kind("Company"):
            self.embed[c] = rng.normal(0, 1, T) / np.sqrt(T) * 0.5

        # movies mix their genres and decade; persons mix their movies' genres
        movie_ids = graph.ids_of_kind("Movie")
        self._movie_parts: dict[int, tuple[np.ndarray, int]] = {}
        for m in movie_ids:
            gs = [e for e in graph.out_neighbors_array(m).tolist() if kinds[e] in ("Genre", "Subject")]
            dec = [e for e in graph.out_neighbors_array(m).tolist() if kinds[e] == "Decade"]
            self._movie_parts[int(m)] = (np.array(sorted(set(gs)), dtype=np.int64), int(dec[0]))
        person_ids = graph.ids_of_kind("Person")
        for p in person_ids.tolist():
            films = graph.in_neighbors_array(p)
            gsets = [self._movie_parts[int(f)][0] for f in films.tolist()[:6]]
            if gsets:
                allg = np.concatenate(gsets)
                self.embed[p] = self.embed[allg].mean(axis=0)
        self.bias[person_ids] = cfg.person_bias

        # popularity percentile drives movie familiarity
        counts = np.zeros(len(graph))
        for meta in popularity.values():
            counts[meta.entity] = meta.external_rating_count
        order = np.argsort(np.argsort(counts[movie_ids]))
        pct = order / max(len(movie_ids) - 1, 1)
        self._movie_pct = dict(zip(movie_ids.tolist(), pct.tolist()))

        self._know = {
            "Genre": cfg.know_genre,
            "Subject": cfg.know_subject,
            "Decade": cfg.know_decade,
            "Person": cfg.know_person,
            "Company": cfg.know_company,
        }
        self._taste: dict[int, np.ndarray] = {}
        self._familiarity: dict[int, float] = {}

    def taste(self, user: int) -> np.ndarray:
        t = self._taste.get(user)
        if t is None:
            rng = np.random.default_rng([self.cfg.seed, 11, user])
            t = rng.normal(0, 1, self.cfg.taste_dims)
            self._taste[user] = t
        return t

    def familiarity_factor(self, user: int) -> float:
        f = self._familiarity.get(user)
        if f is None:
            rng = np.random.default_rng([self.cfg.seed, 17, user])
            f = float(rng.uniform(self.cfg.know_user_lo, self.cfg.know_user_hi))
            self._familiarity[user] = f
        return f

    def affinity(self, user: int, entity: int, rng: np.random.Generator) -> float:
        cfg = self.cfg
        t = self.taste(user)
        kind = self.graph.kinds[entity]
        if kind == "Movie":
            gs, dec = self._movie_parts[entity]
            parts = self.bias[gs] + self.embed[gs] @ t
            if len(parts):
                # one hated genre sinks a movie: mix the mean with the minimum
                g_term = (1 - cfg.movie_genre_veto) * parts.mean() + cfg.movie_genre_veto * parts.min()
            else:
                g_term = 0.0
            d_term = self.bias[dec] + self.embed[dec] @ t
            return (
                cfg.movie_bias
                + cfg.movie_genre_weight * g_term
                + cfg.movie_decade_weight * d_term
                + cfg.movie_noise * rng.normal()
            )
        return float(self.bias[entity] + self.embed[entity] @ t + cfg.de_noise * rng.normal())

    def answer(self, user: int, entity: int) -> int:
        rng = np.random.default_rng([self.cfg.seed, 13, user, entity])
        kind = str(self.graph.kinds[entity])
        if kind == "Movie":
            pct = self._movie_pct[entity]
            p_know = self.cfg.movie_know_base + self.cfg.movie_know_span * pct ** self.cfg.movie_know_power
        else:
            p_know = self._know[kind]
        p_know = min(p_know * self.familiarity_factor(user), 0.97)
        if rng.random() >= p_know:
            return UNKNOWN
        return LIKE if self.affinity(user, entity, rng) > 0 else DISLIKE


def build_popularity(cfg: SynthConfig, w: _World, rng: np.random.Generator) -> list[tuple[str, int, int]]:
    """External popularity counts: Zipf over a shuffled movie order."""
    order = rng.permutation(cfg.n_movies)
    counts = np.floor(1800.0 / (np.arange(1, cfg.n_movies + 1) ** 0.42)).astype(int)
    rows = []
    movies = [f"M{i:05d}" for i in range(cfg.n_movies)]
    for rank, idx in enumerate(order):
        m = movies[int(idx)]
        rows.append((m, int(counts[rank]), w.years[m]))
    rows.sort()
    return rows


def simulate_ratings(
    cfg: SynthConfig,
    graph: KnowledgeGraph,
    popularity: dict[int, MovieMeta],
    n_users: int | None = None,
    progress=None,
) -> list[tuple[str, int, int]]:
    """Run the interview for each simulated user; rows are (user_key, entity
    id, sentiment) in ask order. Final-phase feedback is not exported, which
    keeps the per-user binary volume at the termination threshold."""
    engine = InterviewEngine(graph, popularity, InterviewConfig())
    oracle = LatentOracle(cfg, graph, popularity)
    rows: list[tuple[str, int, int]] = []
    n_users = n_users or cfg.n_users
    for u in range(n_users):
        token = f"u{u:04d}"
        session = engine.new_session(token, rng_seed=int(np.random.default_rng([cfg.seed, 3, u]).integers(0, 2**31)))
        while session.phase not in (Phase.RECOMMENDATION, Phase.DONE):
            answers = [(e, oracle.answer(u, e)) for e in session.pending_batch]
            engine.submit_batch(session, answers)
            rows.extend((token, e, s) for e, s in answers)
        if session.truncated:
            raise RuntimeError(f"user {u} exhausted the pool; enlarge the graph")
        if progress and (u + 1) % 100 == 0:
            progress(u + 1)
    return rows


def trim_to_target(rows: list[tuple[str, int, int]], target: int) -> list[tuple[str, int, int]]:
    """Deterministically drop unknown-sentiment rows from the largest users
    until the total row count matches the target."""
    excess = len(rows) - target
    if excess < 0:
        raise ValueError(f"only {len(rows)} rows generated; need {target}")
    if excess == 0:
        return rows
    totals: dict[str, int] = {}
    for user, _, _ in rows:
        totals[user] = totals.get(user, 0) + 1
    # newest unknown rows of the currently-largest users go first
    indexed = list(enumerate(rows))
    unknown_rows = [(i, user) for i, (user, _, s) in indexed if s == UNKNOWN]
    drop: set[int] = set()
    import heapq

    heap = [(-totals[u], u) for u in totals]
    heapq.heapify(heap)
    by_user: dict[str, list[int]] = {}
    for i, user in unknown_rows:
        by_user.setdefault(user, []).append(i)
    while excess > 0 and heap:
        _, user = heapq.heappop(heap)
        stack = by_user.get(user)
        if not stack:
            continue
        drop.add(stack.pop())
        excess -= 1
        totals[user] -= 1
        heapq.heappush(heap, (-totals[user], user))
    if excess > 0:
        raise ValueError("not enough unknown rows to trim")
    return [row for i, row in indexed if i not in drop]


def generate_snapshot(out_dir: str | Path, cfg: SynthConfig | None = None, progress=None) -> dict:
    """Write entities.csv, triples.csv (+ .relations), popularity.csv,
    ratings.csv, and manifest.json; returns the manifest."""
    cfg = cfg or SynthConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng([cfg.seed, 1])

    world = build_graph_files(cfg, rng)
    entities = [
        Entity(i, uri, name, kind, kind == "Movie")
        for i, (uri, name, kind) in enumerate(world.entities)
    ]
    by_uri = {e.uri: e.id for e in entities}
    edges = [Edge(by_uri[h], r, by_uri[t]) for h, r, t in world.triples]
    graph = KnowledgeGraph(entities, edges, DEFAULT_RELATIONS)
    profile = _verify_profile(cfg, graph)

    pop_rows = build_popularity(cfg, world, np.random.default_rng([cfg.seed, 2]))
    popularity = {
        by_uri[uri]: MovieMeta(by_uri[uri], count, year) for uri, count, year in pop_rows
    }

    rows = simulate_ratings(cfg, graph, popularity, progress=progress)
    rows = trim_to_target(rows, cfg.target_ratings)
    users = {u for u, _, _ in rows}
    if len(users) != cfg.n_users:
        raise ValueError(f"{len(users)} users after trim; expected {cfg.n_users}")

    (out / "entities.csv").write_text(
        "uri,name,kind,recommendable\n"
        + "".join(
            f"{uri},{name},{kind},{'true' if kind == 'Movie' else 'false'}\n"
            for uri, name, kind in world.entities
        )
    )
    (out / "triples.csv").write_text(
        "head_uri,relation,tail_uri\n"
        + "".join(f"{h},{r},{t}\n" for h, r, t in world.triples)
    )
    (out / "triples.csv.relations").write_text("\n".join(DEFAULT_RELATIONS) + "\n")
    (out / "popularity.csv").write_text(
        "entity_uri,external_rating_count,release_year\n"
        + "".join(f"{u},{c},{y}\n" for u, c, y in pop_rows)
    )
    (out / "ratings.csv").write_text(
        "user_id,entity_uri,is_item,sentiment\n"
        + "".join(
            f"{u},{graph.uris[e]},{'true' if graph.recommendable_mask[e] else 'false'},{s}\n"
            for u, e, s in rows
        )
    )
    manifest = {
        "generator": "kgrec.synth",
        "generator_version": GENERATOR_VERSION,
        "seed": cfg.seed,
        "profile": profile,
        "n_users": len(users),
        "n_ratings": len(rows),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
