"""Experiment runner: fits every (model, setting, seed) cell, evaluates it
under leave-one-out, and aggregates means/stds with paired significance.

Cells are independent jobs executed by a fork-based process pool; aggregation
sorts before reducing so worker completion order never changes the output.
"""

from __future__ import annotations

import multiprocessing as mp
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..ratings import RatingStore
from .loo import LooSplit, build_loo
from .metrics import hit_rate_at_k, mean_ndcg_at_k
from .plans import ExperimentPlan, build_experiment_store
from .stats import TTestResult, paired_t_test


@dataclass
class CellResult:
    model: str
    setting: str
    seed: int
    hr: float | None = None
    ndcg: float | None = None
    error: str | None = None


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    models: list[str]
    settings: list[str]
    cells: dict[tuple[str, str], list[CellResult]] = field(default_factory=dict)
    significance: dict[tuple[str, str, str], TTestResult] = field(default_factory=dict)

    def samples(self, model: str, setting: str, metric: str) -> list[float]:
        out = []
        for cell in self.cells[(model, setting)]:
            if cell.error is None:
                out.append(getattr(cell, metric))
        return out

    def mean_std(self, model: str, setting: str, metric: str) -> tuple[float, float, int]:
        vals = self.samples(model, setting, metric)
        if not vals:
            return float("nan"), float("nan"), 0
        arr = np.asarray(vals)
        return float(arr.mean()), float(arr.std(ddof=1)) if len(arr) > 1 else 0.0, len(arr)

    def starred(self, model: str, setting: str, metric: str) -> bool:
        res = self.significance.get((model, setting, metric))
        return bool(res and res.significant)


def evaluate_fitted(model, split: LooSplit, k: int, chunk: int = 128) -> tuple[float, float]:
    """Rank every test user's candidate list and compute HR@k / NDCG@k."""
    users = sorted(split.held_out)
    ranked: dict[int, list[int]] = {}
    for start in range(0, len(users), chunk):
        block = users[start:start + chunk]
        model.warm_cache(block)
        for u in block:
            ranked[u] = model.rank(u, split.candidates[u], k)
    return (
        hit_rate_at_k(ranked, split.held_out, k),
        mean_ndcg_at_k(ranked, split.held_out, k),
    )


# Worker state inherited through fork.
_CTX: dict = {}


def _prepare_context(plan: ExperimentPlan, store: RatingStore, graph, model_specs):
    splits: dict[int, LooSplit] = {}
    trains: dict[tuple[int, str], RatingStore] = {}
    settings = plan.settings()
    for seed in plan.seeds:
        split = build_loo(
            store,
            negatives=plan.negatives,
            exclude_top_popular=plan.exclude_top_popular,
            rng_seed=seed,
        )
        splits[seed] = split
        for s_idx, setting in enumerate(settings):
            rng = np.random.default_rng([seed, s_idx])
            trains[(seed, setting.label())] = build_experiment_store(split.train, setting, rng)
    _CTX.update(
        plan=plan,
        graph=graph,
        splits=splits,
        trains=trains,
        model_specs=list(model_specs),
        settings={s.label(): s for s in settings},
    )


def _run_cell(task: tuple[int, str, int]) -> CellResult:
    seed, setting_label, model_idx = task
    name, params = _CTX["model_specs"][model_idx]
    try:
        from ..models import build_model

        split = _CTX["splits"][seed]
        train = _CTX["trains"][(seed, setting_label)]
        model = build_model(name, **params)
        model.fit(train, _CTX["graph"], rng_seed=seed)
        hr, ndcg = evaluate_fitted(model, split, _CTX["plan"].k)
        return CellResult(name, setting_label, seed, hr=hr, ndcg=ndcg)
    except Exception:
        return CellResult(name, setting_label, seed, error=traceback.format_exc(limit=4))


def run_experiment(
    plan: ExperimentPlan,
    model_specs: list[tuple[str, dict]],
    store: RatingStore,
    graph,
    jobs: int | None = None,
) -> ExperimentResult:
    """Execute the full plan and aggregate. ``model_specs`` is a list of
    (model name, hyperparameter dict). Deterministic given plan.seeds."""
    _prepare_context(plan, store, graph, model_specs)
    settings = [s.label() for s in plan.settings()]
    tasks = [
        (seed, label, idx)
        for idx in range(len(model_specs))
        for label in settings
        for seed in plan.seeds
    ]

    jobs = jobs if jobs is not None else (os.cpu_count() or 1)
    results: list[CellResult] = []
    if jobs <= 1:
        results = [_run_cell(t) for t in tasks]
    else:
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            results = list(pool.map(_run_cell, tasks, chunksize=1))

    model_names = [name for name, _ in model_specs]
    out = ExperimentResult(plan=plan, models=model_names, settings=settings)
    for name in model_names:
        for label in settings:
            bucket = [
                c for c in results if c.model == name and c.setting == label
            ]
            out.cells[(name, label)] = sorted(bucket, key=lambda c: c.seed)

    for base, variant in plan.comparison_pairs():
        for name in model_names:
            for metric in ("hr", "ndcg"):
                a = out.samples(name, variant.label(), metric)
                b = out.samples(name, base.label(), metric)
                if len(a) >= 2 and len(a) == len(b):
                    out.significance[(name, variant.label(), metric)] = paired_t_test(a, b)
    _CTX.clear()
    return out
