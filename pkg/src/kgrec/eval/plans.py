"""Experiment training-set transforms: add / substitute / remove."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..ratings import RatingStore


@dataclass(frozen=True)
class Setting:
    """One training-set recipe. kind: movies | all | substitute | remove."""

    kind: str
    n: int | None = None
    m: int = 4

    def label(self) -> str:
        if self.kind == "movies":
            return "all-movies"
        if self.kind == "all":
            return "all-entities"
        if self.kind == "substitute":
            return f"{self.n}/{self.m}"
        if self.kind == "remove":
            return f"{self.n}/{self.m}-no-de"
        raise ValueError(self.kind)


@dataclass
class ExperimentPlan:
    kind: str  # "add" | "substitute" | "remove"
    ns: tuple[int, ...] = (4, 3, 2, 1)
    exclude_top_popular: bool = True
    seeds: tuple[int, ...] = (11, 23, 37, 53, 71)
    negatives: int = 99
    k: int = 10

    def __post_init__(self):
        if self.kind not in ("add", "substitute", "remove"):
            raise ValueError(f"unknown plan kind {self.kind!r}")
        if self.kind in ("substitute", "remove"):
            bad = [n for n in self.ns if not 1 <= n <= 4]
            if bad:
                raise ValueError(f"n values must be in 1..4, got {bad}")

    def settings(self) -> list[Setting]:
        if self.kind == "add":
            return [Setting("movies"), Setting("all")]
        if self.kind == "substitute":
            return [Setting("substitute", n) for n in self.ns]
        return [Setting("substitute", 4)] + [Setting("remove", n) for n in self.ns if n < 4]

    def comparison_pairs(self) -> list[tuple[Setting, Setting]]:
        """Baseline/variant pairs the significance tests run over."""
        settings = self.settings()
        base = settings[0]
        return [(base, s) for s in settings[1:]]


def build_experiment_store(store: RatingStore, setting: Setting, rng: np.random.Generator) -> RatingStore:
    """Materialize one setting's training set from a (post-split) binary store.

    substitute n: per user keep floor(n/m * N_u) sampled movie ratings plus
    min(ceil((m-n)/m * N_u), available) sampled descriptive ratings.
    remove n: the same movie portion with no descriptive ratings at all.
    """
    if setting.kind == "all":
        return store
    if setting.kind == "movies":
        return store.filter(store.is_item)
    if setting.kind not in ("substitute", "remove"):
        raise ValueError(setting.kind)

    n, m = setting.n, setting.m
    keep = np.zeros(len(store), dtype=bool)
    for u in store.present_users.tolist():
        sl = store.user_slice(u)
        items = store.is_item[sl]
        movie_rows = np.flatnonzero(items) + sl.start
        de_rows = np.flatnonzero(~items) + sl.start
        n_u = len(movie_rows)
        take_movies = math.floor(n / m * n_u)
        if take_movies > 0:
            keep[rng.choice(movie_rows, size=take_movies, replace=False)] = True
        if setting.kind == "substitute":
            take_de = min(math.ceil((m - n) / m * n_u), len(de_rows))
            if take_de > 0:
                keep[rng.choice(de_rows, size=take_de, replace=False)] = True
    return store.filter(keep)
