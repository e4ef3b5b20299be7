"""Declarative experiment configuration: one YAML/JSON file drives dataset
paths, model list, plan, and output; CLI flags override file values.
Unknown keys are rejected before any work starts."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .eval.plans import ExperimentPlan


class ConfigError(ValueError):
    pass


@dataclass
class DatasetPaths:
    entities: str
    triples: str
    ratings: str
    popularity: str | None = None
    relations: str | None = None


@dataclass
class ExperimentConfig:
    dataset: DatasetPaths
    models: list[dict] = field(default_factory=lambda: [{"name": "toppop"}])
    plan: str = "add"
    ns: list[int] = field(default_factory=lambda: [4, 3, 2, 1])
    exclude_top_popular: bool = True
    seeds: list[int] = field(default_factory=lambda: [11, 23, 37, 53, 71])
    negatives: int = 99
    k: int = 10
    jobs: int | None = None
    output_dir: str = "experiment-out"

    def experiment_plan(self) -> ExperimentPlan:
        return ExperimentPlan(
            kind=self.plan,
            ns=tuple(self.ns),
            exclude_top_popular=self.exclude_top_popular,
            seeds=tuple(self.seeds),
            negatives=self.negatives,
            k=self.k,
        )

    def model_specs(self) -> list[tuple[str, dict]]:
        specs = []
        for entry in self.models:
            entry = dict(entry)
            name = entry.pop("name", None)
            if not name:
                raise ConfigError("each model entry needs a 'name'")
            specs.append((name, entry))
        return specs

    def as_dict(self) -> dict:
        return {
            "dataset": vars(self.dataset),
            "models": self.models,
            "plan": self.plan,
            "ns": self.ns,
            "exclude_top_popular": self.exclude_top_popular,
            "seeds": self.seeds,
            "negatives": self.negatives,
            "k": self.k,
            "output_dir": self.output_dir,
        }


def _strict(cls, data: dict, where: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    text = path.read_text()
    data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    _strict(ExperimentConfig, data, "config")
    raw_dataset = data.get("dataset")
    if not isinstance(raw_dataset, dict):
        raise ConfigError(f"{path}: 'dataset' section is required")
    _strict(DatasetPaths, raw_dataset, "dataset")
    dataset = DatasetPaths(**raw_dataset)
    cfg = ExperimentConfig(dataset=dataset, **{k: v for k, v in data.items() if k != "dataset"})
    if cfg.plan not in ("add", "substitute", "remove"):
        raise ConfigError(f"plan must be add/substitute/remove, got {cfg.plan!r}")
    if len(cfg.seeds) < 2:
        raise ConfigError("need at least 2 seeds for paired significance tests")
    return cfg
