"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The dataset-scale criteria run against the pinned snapshot: a real export if
KGREC_DATASET_DIR points at one (entities.csv/triples.csv/ratings.csv/
popularity.csv), otherwise the bundled deterministic synthetic snapshot
(generated into data/synth on first use and reused afterwards).

Run only this module with: pytest tests/test_acceptance.py -v -s
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

from kgrec.synth import GENERATOR_VERSION, SynthConfig, generate_snapshot

REPO = Path(__file__).resolve().parent.parent
SNAPSHOT_DIR = REPO / "data" / "synth"

EXPECTED = {
    "nodes": 18707,
    "edges": 198452,
    "min_degree": 4,
    "median_degree": 10,
    "mean_degree_rounded": 21,
    "max_degree": 4454,
    "components": 1,
    "users": 1174,
    "ratings": 102160,
}


def criterion(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {name}: {status}  {detail}")
    assert ok, f"{name}: {detail}"


def _ensure_snapshot() -> tuple[Path, str]:
    env = os.environ.get("KGREC_DATASET_DIR")
    if env:
        return Path(env), "external"
    manifest_path = SNAPSHOT_DIR / "manifest.json"
    cfg = SynthConfig()
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        if manifest.get("seed") == cfg.seed and manifest.get("generator_version") == GENERATOR_VERSION:
            return SNAPSHOT_DIR, "synthetic"
    generate_snapshot(SNAPSHOT_DIR, cfg)
    return SNAPSHOT_DIR, "synthetic"


@pytest.fixture(scope="module")
def snapshot():
    from kgrec.graph import load_graph
    from kgrec.ratings import load_ratings, to_binary
    from kgrec.sampling import load_popularity

    path, source = _ensure_snapshot()
    t0 = time.monotonic()
    graph = load_graph(path / "entities.csv", path / "triples.csv")
    store = load_ratings(path / "ratings.csv", graph)
    load_seconds = time.monotonic() - t0
    popularity = load_popularity(path / "popularity.csv", graph)
    return {
        "path": path,
        "source": source,
        "graph": graph,
        "store": store,
        "binary": to_binary(store),
        "popularity": popularity,
        "load_seconds": load_seconds,
    }


# -- 1. dataset statistics ----------------------------------------------------


def test_dataset_statistics(snapshot, tiny_files, capsys):
    from kgrec.graph import degree_stats

    t0 = time.monotonic()
    stats = degree_stats(snapshot["graph"])
    store = snapshot["store"]
    elapsed = time.monotonic() - t0 + snapshot["load_seconds"]

    got = {
        "nodes": stats.node_count,
        "edges": stats.edge_count,
        "min_degree": stats.min_degree,
        "median_degree": stats.median_degree,
        "mean_degree_rounded": round(stats.mean_degree),
        "max_degree": stats.max_degree,
        "components": stats.component_count,
        "users": store.n_users,
        "ratings": store.n_ratings,
    }
    mismatches = {k: (got[k], EXPECTED[k]) for k in EXPECTED if got[k] != EXPECTED[k]}

    # bundled fixture golden-file check
    from kgrec.cli import main

    assert main([
        "stats",
        "--entities", str(tiny_files["entities"]),
        "--triples", str(tiny_files["triples"]),
        "--ratings", str(tiny_files["ratings"]),
    ]) == 0
    fixture_out = capsys.readouterr().out
    golden = (REPO / "tests" / "data" / "golden_tiny_stats.txt").read_text()
    golden_ok = fixture_out == golden

    criterion(
        "dataset-statistics",
        not mismatches and golden_ok and elapsed < 30.0,
        f"source={snapshot['source']} stats+load={elapsed:.1f}s mismatches={mismatches or 'none'}"
        f" golden={'ok' if golden_ok else 'MISMATCH'}",
    )


# -- 2. metric oracles ----------------------------------------------------------


def test_metric_oracles():
    from kgrec.eval import hit_rate_at_k, mean_ndcg_at_k, ndcg_at_k

    from .oracles import brute_force_hr, brute_force_ndcg

    t0 = time.monotonic()
    rng = np.random.default_rng(1234)
    exact = True
    for _ in range(100):
        n_users = int(rng.integers(1, 51))
        n_items = int(rng.integers(5, 201))
        k = int(rng.integers(1, 25))
        ranked = {}
        held = {}
        for u in range(n_users):
            size = int(rng.integers(1, min(n_items, 40)))
            ranked[u] = rng.choice(n_items, size=size, replace=False).tolist()
            held[u] = int(rng.integers(0, n_items))
        exact &= hit_rate_at_k(ranked, held, k) == brute_force_hr(ranked, held, k)
        want = sum(brute_force_ndcg(ranked[u], held[u], k) for u in held) / len(held)
        exact &= mean_ndcg_at_k(ranked, held, k) == pytest.approx(want, abs=0)
        for u in held:
            exact &= ndcg_at_k(ranked[u], held[u], k) == brute_force_ndcg(ranked[u], held[u], k)
    elapsed = time.monotonic() - t0
    criterion("metric-oracles", exact and elapsed < 5.0, f"100 instances exact, {elapsed:.1f}s")


# -- 3. PPR correctness -----------------------------------------------------------


def test_ppr_linear_solve_oracle():
    from kgrec.pagerank import personalized_pagerank

    from .conftest import build_kg
    from .oracles import dense_pagerank

    t0 = time.monotonic()
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 13))
        entities = [(f"e{i}", "Movie") for i in range(n)]
        triples = []
        for _ in range(int(rng.integers(n, 3 * n))):
            a, b = rng.integers(0, n, 2)
            if a != b:
                triples.append((f"e{a}", "FOLLOWED_BY", f"e{b}"))
        g = build_kg(entities, triples)
        arcs = list(zip(*[arr.tolist() for arr in g.arc_arrays()]))
        for _ in range(3):
            k = int(rng.integers(1, n + 1))
            seeds = rng.choice(n, size=k, replace=False).tolist()
            teleport = np.zeros(n)
            teleport[seeds] = 1.0 / k
            got = personalized_pagerank(g, set(seeds), tol=1e-12, max_iters=5000)
            expected = dense_pagerank(n, arcs, teleport, 0.85)
            worst = max(worst, float(np.abs(got.scores - expected).sum()))
    elapsed = time.monotonic() - t0
    criterion(
        "ppr-linear-solve",
        worst <= 1e-6 and elapsed < 5.0,
        f"worst L1 {worst:.2e} over 20 graphs x 3 seed sets, {elapsed:.1f}s",
    )


# -- 4. gradient checks ------------------------------------------------------------


def test_gradient_checks():
    from kgrec.models.bpr import pairwise_loss_and_grad
    from kgrec.models.trans import hyperplane_pair_loss, translation_pair_loss

    t0 = time.monotonic()
    h = 1e-6
    worst = 0.0

    def check(loss_fn, vecs):
        nonlocal worst
        _, grads = loss_fn(vecs)
        for which, grad in enumerate(grads):
            for idx in range(len(vecs[which])):
                plus = [v.copy() for v in vecs]
                minus = [v.copy() for v in vecs]
                plus[which][idx] += h
                minus[which][idx] -= h
                fd = (loss_fn(plus)[0] - loss_fn(minus)[0]) / (2 * h)
                denom = max(abs(fd), abs(grad[idx]), 1.0)
                worst = max(worst, abs(fd - grad[idx]) / denom)

    rng = np.random.default_rng(55)
    d = 6
    for _ in range(50):
        check(lambda v: pairwise_loss_and_grad(*v, 0.01), [rng.normal(0, 1, d) for _ in range(3)])
    done = 0
    while done < 50:
        vecs = [rng.normal(0, 1, d) for _ in range(5)]
        if translation_pair_loss(*vecs, 1.0)[0] > 1e-3:
            check(lambda v: translation_pair_loss(*v, 1.0), vecs)
            done += 1
    done = 0
    while done < 50:
        vecs = [rng.normal(0, 1, d) for _ in range(6)]
        if hyperplane_pair_loss(*vecs, 1.0)[0] > 1e-3:
            check(lambda v: hyperplane_pair_loss(*v, 1.0), vecs)
            done += 1
    elapsed = time.monotonic() - t0
    criterion(
        "gradient-checks",
        worst <= 1e-4 and elapsed < 30.0,
        f"worst relative error {worst:.2e} over 150 points, {elapsed:.1f}s",
    )


# -- 5. ALS monotonicity -------------------------------------------------------------


def test_als_monotonicity():
    from kgrec.models.mf import AlsMF

    from .conftest import build_kg, make_store

    t0 = time.monotonic()
    graph = build_kg([(f"m{i:02d}", "Movie") for i in range(20)], [])
    rng = np.random.default_rng(9)
    monotone = True
    for trial in range(10):
        rows = []
        seen = set()
        for _ in range(int(rng.integers(20, 60))):
            u = f"u{rng.integers(0, 8)}"
            m = f"m{rng.integers(0, 20):02d}"
            if (u, m) in seen:
                continue
            seen.add((u, m))
            rows.append((u, m, int(rng.choice([1, -1]))))
        model = AlsMF(d=4, reg=0.1, epochs=6).fit(make_store(graph, rows), rng_seed=trial)
        trace = model.objective_trace
        monotone &= all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))
    elapsed = time.monotonic() - t0
    criterion("als-monotonicity", monotone and elapsed < 10.0,
              f"10 instances, every half-sweep non-increasing, {elapsed:.1f}s")


# -- experiments ----------------------------------------------------------------------


PPR_PARAMS = {"tol": 1e-6, "max_iters": 200}
TRANS_PARAMS = {"d": 32, "lr": 0.02, "epochs": 25}


@pytest.fixture(scope="module")
def experiment_a(snapshot):
    from kgrec.eval import ExperimentPlan, run_experiment

    plan = ExperimentPlan(kind="add", exclude_top_popular=True,
                          seeds=(11, 23, 37, 53, 71), negatives=99, k=10)
    specs = [
        ("toppop", {}),
        ("item-knn", {"k": 20}),
        ("ppr-kg", dict(PPR_PARAMS)),
        ("ppr-joint", dict(PPR_PARAMS)),
    ]
    t0 = time.monotonic()
    result = run_experiment(plan, specs, snapshot["binary"], snapshot["graph"])
    return result, time.monotonic() - t0


def test_experiment_a_directions(experiment_a):
    result, elapsed = experiment_a
    knn_movies, _, _ = result.mean_std("item-knn", "all-movies", "hr")
    knn_all, _, _ = result.mean_std("item-knn", "all-entities", "hr")
    knn_sig = result.significance[("item-knn", "all-entities", "hr")]
    rel = (knn_all - knn_movies) / knn_movies if knn_movies > 0 else float("inf")

    toppop_ndcg, _, _ = result.mean_std("toppop", "all-entities", "ndcg")
    pprkg_ndcg, _, _ = result.mean_std("ppr-kg", "all-entities", "ndcg")
    pprj_ndcg, _, _ = result.mean_std("ppr-joint", "all-entities", "ndcg")

    ok = (
        rel >= 0.5
        and knn_sig.significant
        and pprkg_ndcg > toppop_ndcg
        and pprj_ndcg > toppop_ndcg
        and elapsed < 1800
    )
    criterion(
        "experiment-a",
        ok,
        f"item-knn HR {knn_movies:.3f}->{knn_all:.3f} (+{rel * 100:.0f}%, p={knn_sig.p_value:.4f});"
        f" NDCG toppop {toppop_ndcg:.3f} vs ppr-kg {pprkg_ndcg:.3f} / ppr-joint {pprj_ndcg:.3f};"
        f" {elapsed / 60:.1f} min",
    )


def test_experiment_b_ppr_kg_monotone(snapshot):
    from kgrec.eval import ExperimentPlan, run_experiment

    plan = ExperimentPlan(kind="substitute", ns=(4, 3, 2, 1), exclude_top_popular=True,
                          seeds=(11, 23, 37, 53, 71), negatives=99, k=10)
    t0 = time.monotonic()
    result = run_experiment(plan, [("ppr-kg", dict(PPR_PARAMS))], snapshot["binary"], snapshot["graph"])
    elapsed = time.monotonic() - t0
    means = [result.mean_std("ppr-kg", f"{n}/4", "ndcg")[0] for n in (4, 3, 2, 1)]
    sig = result.significance[("ppr-kg", "1/4", "ndcg")]
    monotone = all(b >= a - 1e-9 for a, b in zip(means, means[1:]))
    uplift = means[-1] - means[0]
    ok = monotone and uplift >= 0.05 and sig.significant
    criterion(
        "experiment-b",
        ok,
        f"ppr-kg NDCG 4/4->1/4: {', '.join(f'{m:.3f}' for m in means)};"
        f" uplift {uplift:.3f}; p(1/4 vs 4/4)={sig.p_value:.4f}; {elapsed / 60:.1f} min",
    )


@pytest.fixture(scope="module")
def experiment_c(snapshot):
    from kgrec.eval import ExperimentPlan, run_experiment

    plan = ExperimentPlan(kind="remove", ns=(1,), exclude_top_popular=True,
                          seeds=(11, 23, 37, 53, 71), negatives=99, k=10)
    specs = [
        ("toppop", {}),
        ("mf", {"d": 32, "reg": 0.1, "epochs": 15}),
        ("bpr", {"d": 32, "lr": 0.05, "reg": 0.002, "epochs": 25}),
        ("user-knn", {"k": 20}),
        ("item-knn", {"k": 20}),
        ("transe", dict(TRANS_PARAMS)),
        ("transe-kg", dict(TRANS_PARAMS)),
        ("transh", dict(TRANS_PARAMS)),
        ("transh-kg", dict(TRANS_PARAMS)),
        ("ppr-kg", dict(PPR_PARAMS)),
        ("ppr-collab", dict(PPR_PARAMS)),
        ("ppr-joint", dict(PPR_PARAMS)),
    ]
    t0 = time.monotonic()
    result = run_experiment(plan, specs, snapshot["binary"], snapshot["graph"])
    return result, time.monotonic() - t0


def test_experiment_c_removal_degrades(experiment_c):
    result, elapsed = experiment_c
    degraded = []
    details = []
    for name in result.models:
        if name == "toppop":
            continue
        base, _, _ = result.mean_std(name, "4/4", "hr")
        removed, _, _ = result.mean_std(name, "1/4-no-de", "hr")
        sig = result.significance.get((name, "1/4-no-de", "hr"))
        is_degraded = removed < base and sig is not None and sig.significant
        degraded.append(is_degraded)
        details.append(f"{name} {base:.3f}->{removed:.3f}{'*' if is_degraded else ''}")
    count = sum(degraded)
    criterion(
        "experiment-c",
        count >= 9,
        f"{count}/11 models degrade significantly; {'; '.join(details)}; {elapsed / 60:.1f} min",
    )


# -- label propagation -------------------------------------------------------------------


def test_label_propagation(snapshot):
    from kgrec.models.labelprop import evaluate_label_propagation

    t0 = time.monotonic()
    report = evaluate_label_propagation(snapshot["binary"], snapshot["graph"], iters=10)
    elapsed = time.monotonic() - t0
    gain = report["accuracy"] - report["weighted_random_accuracy"]
    ratio_ok = abs(report["predicted_like_share"] - 0.73) <= 0.10
    ok = gain >= 0.05 and ratio_ok and elapsed < 600
    criterion(
        "label-propagation",
        ok,
        f"accuracy {report['accuracy']:.3f} vs weighted-random {report['weighted_random_accuracy']:.3f}"
        f" (gain {gain:.3f}); predicted like share {report['predicted_like_share']:.3f};"
        f" {elapsed:.0f}s",
    )


# -- interview invariants ---------------------------------------------------------------------


def test_interview_invariants_10k():
    from kgrec.interview import InterviewEngine, Phase
    from kgrec.ratings import RatingStore

    from .conftest import make_interview_world

    t0 = time.monotonic()
    worlds = [make_interview_world(rng_seed=w, n_movies=36, n_genres=5, n_people=10)
              for w in range(4)]
    engines = [InterviewEngine(g, pop) for g, pop in worlds]
    for engine in engines:
        engine.scores  # warm the pagerank cache outside the timed loop? keep inside budget anyway

    order = [Phase.INITIAL, Phase.EXPLORATION, Phase.RECOMMENDATION, Phase.DONE]
    rng = np.random.default_rng(2024)
    violations = []
    runs = 10_000
    for trial in range(runs):
        engine = engines[trial % len(engines)]
        graph = engine.graph
        movies = graph.recommendable_ids
        n_rated = int(rng.integers(1, 30))
        ents = rng.choice(movies, size=min(n_rated, len(movies)), replace=False)
        sents = rng.choice([1, -1, 0], size=len(ents), p=[0.5, 0.2, 0.3])
        store = RatingStore(
            np.zeros(len(ents), dtype=np.int64), ents.astype(np.int64),
            sents.astype(np.int64), np.ones(len(ents), dtype=bool), ["u"], graph,
        )
        session = engine.replay_with_oracle(store, 0, rng_seed=trial)
        seen = set()
        last = 0
        for batch_no, answers in session.transcript:
            batch = [e for e, _ in answers]
            if len(set(batch)) != len(batch) or (set(batch) & seen):
                violations.append((trial, "re-asked entity"))
                break
            seen |= set(batch)
        if session.phase != Phase.DONE:
            violations.append((trial, "did not terminate"))
        if session.binary_count != len(session.liked) + len(session.disliked):
            violations.append((trial, "set bookkeeping"))
        if not (session.liked | session.disliked | session.unknown) <= session.asked:
            violations.append((trial, "answers outside asked"))
        if not session.truncated and session.final is not None:
            if session.binary_count < engine.config.binary_target:
                violations.append((trial, "reached recommendation early"))
        # batch-size-9 invariant for the non-final phases
        for idx, (batch_no, answers) in enumerate(session.transcript):
            is_final_batch = session.final is not None and idx == len(session.transcript) - 1
            if not is_final_batch and len(answers) != 9:
                violations.append((trial, f"batch size {len(answers)}"))
                break
    elapsed = time.monotonic() - t0
    criterion(
        "interview-invariants",
        not violations and elapsed < 60.0,
        f"{runs} replays, {len(violations)} violations, {elapsed:.1f}s",
    )


# -- TopPop reference point ----------------------------------------------------------------------


def test_toppop_reference_point(snapshot):
    from kgrec.eval import ExperimentPlan, build_loo, evaluate_fitted
    from kgrec.models import build_model

    hrs = []
    full_hrs = []
    for seed in (11, 23, 37):
        split = build_loo(snapshot["binary"], negatives=99, exclude_top_popular=True, rng_seed=seed)
        model = build_model("toppop").fit(split.train, snapshot["graph"], rng_seed=seed)
        hr, _ = evaluate_fitted(model, split, 10)
        hrs.append(hr)
        full_split = build_loo(snapshot["binary"], negatives=0, exclude_top_popular=True, rng_seed=seed)
        model_f = build_model("toppop").fit(full_split.train, snapshot["graph"], rng_seed=seed)
        hr_f, _ = evaluate_fitted(model_f, full_split, 10)
        full_hrs.append(hr_f)
    mean_hr = float(np.mean(hrs))
    mean_full = float(np.mean(full_hrs))
    in_band = abs(mean_hr - 0.43) <= 0.08
    detail = (
        f"HR@10 (99 negatives, exclusion) = {mean_hr:.3f}; band 0.43±0.08 ->"
        f" {'within' if in_band else 'DEVIATION (reported, not fatal)'};"
        f" full-ranking comparison: HR@10 = {mean_full:.3f}"
    )
    # deviation is reported, not fatal: hard-fail only on a nonsensical value
    criterion("toppop-reference", 0.0 < mean_hr < 1.0, detail)
    if not in_band:
        print("ACCEPTANCE toppop-reference NOTE: outside the paper band; see detail above")
