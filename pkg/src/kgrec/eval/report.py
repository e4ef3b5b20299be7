"""Result tables: machine-readable TSV and an aligned human table, plus the
run manifest. Output is byte-stable for a fixed config."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .runner import ExperimentResult


def result_tsv(result: ExperimentResult) -> str:
    lines = ["model\tsetting\tmetric\tmean\tstd\truns\tsignificant"]
    for name in result.models:
        for setting in result.settings:
            for metric in ("hr", "ndcg"):
                mean, std, runs = result.mean_std(name, setting, metric)
                star = "1" if result.starred(name, setting, metric) else "0"
                lines.append(
                    f"{name}\t{setting}\t{metric}\t{mean:.6f}\t{std:.6f}\t{runs}\t{star}"
                )
    return "\n".join(lines) + "\n"


def result_text(result: ExperimentResult, k: int | None = None) -> str:
    k = k if k is not None else result.plan.k
    headers = ["model"] + [
        f"{s} {m}@{k}" for s in result.settings for m in ("HR", "NDCG")
    ]
    rows = []
    for name in result.models:
        row = [name]
        for setting in result.settings:
            for metric in ("hr", "ndcg"):
                mean, std, runs = result.mean_std(name, setting, metric)
                if runs == 0:
                    row.append("failed")
                    continue
                star = "*" if result.starred(name, setting, metric) else ""
                row.append(f"{mean:.2f}±{std:.2f}{star}")
        rows.append(row)
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    out.append("  ".join("-" * w for w in widths))
    for row in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    out.append("")
    out.append("* = paired t-test p < 0.05 against the first setting column")
    return "\n".join(out) + "\n"


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def run_manifest(config: dict, result: ExperimentResult) -> dict:
    import numpy
    import scipy

    from .. import __version__
    from ..kernels import BACKEND

    return {
        "config": config,
        "config_hash": config_hash(config),
        "seeds": list(result.plan.seeds),
        "resplit_policy": "per-seed (split and training transforms rebuilt for every seed)",
        "candidate_protocol": (
            "held-out + uniformly sampled unrated recommendables"
            f" (negatives={result.plan.negatives}; 0 means full ranking)"
        ),
        "versions": {
            "kgrec": __version__,
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
            "kernel_backend": BACKEND,
        },
    }


def write_outputs(out_dir: str | Path, config: dict, result: ExperimentResult) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.tsv").write_text(result_tsv(result))
    (out / "results.txt").write_text(result_text(result))
    (out / "manifest.json").write_text(
        json.dumps(run_manifest(config, result), indent=2, sort_keys=True) + "\n"
    )
