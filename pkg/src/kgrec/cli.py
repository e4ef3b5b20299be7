"""Command-line workbench driver.

Subcommands: stats, pagerank, replay, train, evaluate, experiment, propagate,
serve, synth. Exit codes: 0 ok, 1 systemic failure, 2 usage/input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _load_dataset(args, need_ratings=True, need_popularity=False):
    from .graph import load_graph
    from .ratings import load_ratings
    from .sampling import load_popularity

    graph = load_graph(args.entities, args.triples, getattr(args, "relations", None))
    store = load_ratings(args.ratings, graph) if need_ratings and args.ratings else None
    popularity = None
    if need_popularity:
        if not args.popularity:
            raise FileNotFoundError("a popularity file is required for this command")
        popularity = load_popularity(args.popularity, graph)
    return graph, store, popularity


def _dataset_args(sub, ratings=True, popularity=False):
    sub.add_argument("--entities", required=True)
    sub.add_argument("--triples", required=True)
    sub.add_argument("--relations", default=None)
    if ratings:
        sub.add_argument("--ratings", required=True)
    if popularity:
        sub.add_argument("--popularity", required=True)


def cmd_stats(args) -> int:
    from .analytics import (
        co_rating_histogram,
        coverage_report,
        long_tail_report,
        sentiment_distribution_by_kind,
        share_of_top_fraction,
        top_entities_per_sentiment,
    )
    from .graph import degree_stats
    from .ratings import to_binary

    graph, store, _ = _load_dataset(args)
    stats = degree_stats(graph)
    lines = []
    plurals = {
        "Decade": "decades", "Company": "companies", "Genre": "genres",
        "Subject": "subjects", "Category": "categories", "Movie": "movies",
        "Person": "people",
    }
    lines.append("== knowledge graph ==")
    lines.append(f"nodes: {stats.node_count}")
    for kind in ("Decade", "Company", "Genre", "Subject", "Category", "Movie", "Person"):
        if kind in stats.kind_counts:
            lines.append(f"  {plurals[kind]}: {stats.kind_counts[kind]}")
    categories = sum(stats.kind_counts.get(k, 0) for k in ("Genre", "Subject", "Category"))
    if categories:
        lines.append(f"  categories (genre+subject): {categories}")
    lines.append(f"edges: {stats.edge_count}")
    lines.append(f"degree min/median/mean/max: {stats.min_degree}/{stats.median_degree:g}"
                 f"/{stats.mean_degree:.0f} ({stats.mean_degree:.3f})/{stats.max_degree}")
    lines.append(f"connected components: {stats.component_count}")

    lines.append("== ratings ==")
    lines.append(f"users: {store.n_users}")
    lines.append(f"ratings: {store.n_ratings}")
    binary = to_binary(store)
    lines.append(f"binary ratings: {binary.n_ratings}")
    lines.append(f"mean ratings per user: {store.n_ratings / store.n_users:.1f}"
                 f" ({binary.n_ratings / max(binary.n_users, 1):.1f} binary)")

    lines.append("== long tail (binary) ==")
    tail = long_tail_report(binary)
    for frac in (0.0198, 0.05, 0.2):
        lines.append(f"top {frac * 100:.2f}% most popular absorb"
                     f" {share_of_top_fraction(tail, frac) * 100:.1f}% of ratings")

    lines.append("== coverage by kind (none / unknown-only / binary) ==")
    for kind, (none, unk, binr) in sorted(coverage_report(store).items()):
        lines.append(f"  {kind}: {none:.3f} / {unk:.3f} / {binr:.3f}")

    lines.append("== session sentiment shares by kind (like / dislike / unknown) ==")
    for kind, (like, dislike, unknown) in sorted(sentiment_distribution_by_kind(store).items()):
        lines.append(f"  {kind}: {like:.3f} / {dislike:.3f} / {unknown:.3f}")

    lines.append("== co-ratings (binary) ==")
    for cls in ("recommendable", "descriptive"):
        hist = co_rating_histogram(binary, cls)
        if hist:
            total_pairs = sum(hist.values())
            top = max(hist)
            lines.append(f"  {cls}: {total_pairs} user pairs share ratings; max co-count {top}")
        else:
            lines.append(f"  {cls}: no co-rating pairs")

    lines.append("== top entities per answer ==")
    tops = top_entities_per_sentiment(store, args.top)
    for sentiment, label in ((1, "like"), (-1, "dislike"), (0, "unknown")):
        names = ", ".join(
            f"{graph.entities[e].name} ({c})" for e, c in tops[sentiment]
        )
        lines.append(f"  {label}: {names}")

    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK


def cmd_pagerank(args) -> int:
    from .pagerank import global_pagerank, personalized_pagerank

    graph, _, _ = _load_dataset(args, need_ratings=False)
    if args.seeds_uris:
        seeds = {graph.id_of(u) for u in args.seeds_uris.split(",")}
        scores = personalized_pagerank(graph, seeds, damping=args.damping)
    else:
        scores = global_pagerank(graph, damping=args.damping)
    top = scores.top(args.top)
    for e in top:
        ent = graph.entities[e]
        sys.stdout.write(f"{scores.scores[e]:.6g}\t{ent.uri}\t{ent.name}\n")
    return EXIT_OK


def cmd_replay(args) -> int:
    from .interview import InterviewEngine, Phase
    from .ratings import to_binary

    graph, store, popularity = _load_dataset(args, need_popularity=True)
    engine = InterviewEngine(graph, popularity)
    binary = to_binary(store)
    rng = np.random.default_rng(args.seed)
    users = binary.present_users.tolist()
    if args.users:
        users = users[: args.users]
    seeds = [int(s) for s in args.replay_seeds.split(",")] if args.replay_seeds else [args.seed]
    completed = 0
    total_runs = 0
    asked_counts = []
    for seed in seeds:
        for u in users:
            session = engine.replay_with_oracle(store, u, rng_seed=seed * 100003 + u)
            total_runs += 1
            asked_counts.append(len(session.asked))
            if session.phase == Phase.DONE and not session.truncated:
                completed += 1
    rate = completed / max(total_runs, 1)
    sys.stdout.write(
        f"replays: {total_runs}\ncompleted: {completed} ({rate * 100:.1f}%)\n"
        f"mean entities asked: {np.mean(asked_counts):.1f}\n"
    )
    return EXIT_OK


def cmd_train(args) -> int:
    from .models import build_model
    from .models.checkpoint import save_checkpoint
    from .ratings import to_binary

    graph, store, _ = _load_dataset(args)
    params = json.loads(args.params) if args.params else {}
    model = build_model(args.model, **params)
    model.fit(to_binary(store), graph, rng_seed=args.seed)
    save_checkpoint(args.out, model, params)
    sys.stdout.write(f"saved {args.model} checkpoint to {args.out}\n")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .eval import build_loo, evaluate_fitted
    from .models import build_model
    from .models.checkpoint import load_checkpoint
    from .ratings import to_binary

    graph, store, _ = _load_dataset(args)
    binary = to_binary(store)
    split = build_loo(
        binary,
        negatives=args.negatives,
        exclude_top_popular=args.exclude_top_popular,
        rng_seed=args.seed,
    )
    if args.checkpoint:
        model = load_checkpoint(args.checkpoint, split.train, graph)
        name = model.name
    else:
        params = json.loads(args.params) if args.params else {}
        model = build_model(args.model, **params)
        model.fit(split.train, graph, rng_seed=args.seed)
        name = args.model
    hr, ndcg = evaluate_fitted(model, split, args.k)
    sys.stdout.write(f"{name}: HR@{args.k} {hr:.4f}  NDCG@{args.k} {ndcg:.4f}"
                     f"  (test users: {len(split.held_out)})\n")
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .config import load_config
    from .eval import run_experiment
    from .eval.report import result_text, write_outputs
    from .ratings import to_binary

    cfg = load_config(args.config)
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.out:
        cfg.output_dir = args.out

    class _Args:
        entities = cfg.dataset.entities
        triples = cfg.dataset.triples
        relations = cfg.dataset.relations
        ratings = cfg.dataset.ratings
        popularity = cfg.dataset.popularity

    graph, store, _ = _load_dataset(_Args)
    binary = to_binary(store)
    result = run_experiment(cfg.experiment_plan(), cfg.model_specs(), binary, graph, jobs=cfg.jobs)
    write_outputs(cfg.output_dir, cfg.as_dict(), result)
    sys.stdout.write(result_text(result))
    failures = [
        c for cells in result.cells.values() for c in cells if c.error is not None
    ]
    if failures:
        sys.stderr.write(f"{len(failures)} cell(s) failed; see results\n")
    return EXIT_OK


def cmd_propagate(args) -> int:
    from .models.labelprop import evaluate_label_propagation
    from .ratings import to_binary

    graph, store, _ = _load_dataset(args)
    report = evaluate_label_propagation(to_binary(store), graph, iters=args.iters)
    for key in (
        "accuracy", "weighted_random_accuracy", "like_ratio", "predicted_like_share",
        "precision_positive", "recall_positive", "precision_negative", "recall_negative",
        "n_predictions",
    ):
        sys.stdout.write(f"{key}: {report[key]:.4f}\n")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        entities=args.entities,
        triples=args.triples,
        relations=args.relations,
        popularity=args.popularity,
        data_dir=args.data_dir,
        static_dir=args.static,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synth import SynthConfig, generate_snapshot

    cfg = SynthConfig(seed=args.seed) if args.seed is not None else SynthConfig()
    out = args.out or args.out_default
    manifest = generate_snapshot(out, cfg, progress=lambda n: sys.stderr.write(f"{n} users\n"))
    sys.stdout.write(json.dumps(manifest["profile"], indent=2, sort_keys=True) + "\n")
    sys.stdout.write(f"users: {manifest['n_users']}  ratings: {manifest['n_ratings']}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgrec", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="rng seed (synth: pinned generator seed)")
    common.add_argument("--jobs", type=int, default=None, help="parallel workers")
    common.add_argument("--out", default=None, help="output path/dir")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="graph + dataset analytics", parents=[common])
    _dataset_args(p)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("pagerank", help="global or personalized PageRank", parents=[common])
    _dataset_args(p, ratings=False)
    p.add_argument("--seeds-uris", default=None, help="comma-separated seed uris")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--top", type=int, default=20)
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("replay", help="offline interview replay with recorded oracles", parents=[common])
    _dataset_args(p, popularity=True)
    p.add_argument("--users", type=int, default=None, help="cap on replayed users")
    p.add_argument("--replay-seeds", default=None, help="comma-separated seeds")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("train", help="fit one model and save a checkpoint", parents=[common])
    _dataset_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--params", default=None, help="JSON hyperparameters")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="LOO-evaluate a model or checkpoint", parents=[common])
    _dataset_args(p)
    p.add_argument("--model", default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--params", default=None)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--negatives", type=int, default=99)
    p.add_argument("--exclude-top-popular", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="run a full experiment config", parents=[common])
    p.add_argument("config")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("propagate", help="label-propagation report", parents=[common])
    _dataset_args(p)
    p.add_argument("--iters", type=int, default=10)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("serve", help="run the interview HTTP service", parents=[common])
    _dataset_args(p, ratings=False, popularity=True)
    p.add_argument("--data-dir", default="service-data")
    p.add_argument("--static", default=None, help="built UI bundle directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate the synthetic dataset snapshot", parents=[common])
    p.set_defaults(func=cmd_synth, out_default="data/synth")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "seed", None) is None:
        args.seed = None if args.command == "synth" else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: missing file: {exc}\n")
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # systemic failure
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
