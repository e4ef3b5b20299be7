"""The recommender zoo behind one fit/score/rank contract."""

from __future__ import annotations

from .base import Recommender
from .bpr import BPR
from .knn import ItemKNN, UserKNN
from .labelprop import evaluate_label_propagation, label_propagate, label_propagate_batch
from .mf import AlsMF
from .ppr import PPRRecommender, GraphView
from .toppop import TopPop
from .trans import TransE, TransH

MODEL_FACTORIES = {
    "toppop": TopPop,
    "mf": AlsMF,
    "bpr": BPR,
    "user-knn": UserKNN,
    "item-knn": ItemKNN,
    "transe": lambda **kw: TransE(kg_mode=False, **kw),
    "transe-kg": lambda **kw: TransE(kg_mode=True, **kw),
    "transh": lambda **kw: TransH(kg_mode=False, **kw),
    "transh-kg": lambda **kw: TransH(kg_mode=True, **kw),
    "ppr-kg": lambda **kw: PPRRecommender("KG", **kw),
    "ppr-collab": lambda **kw: PPRRecommender("COLLAB", **kw),
    "ppr-joint": lambda **kw: PPRRecommender("JOINT", **kw),
}

ALL_MODEL_NAMES = tuple(MODEL_FACTORIES)


def build_model(name: str, **params) -> Recommender:
    try:
        factory = MODEL_FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; known: {sorted(MODEL_FACTORIES)}") from None
    model = factory(**params)
    model.name = name
    return model


__all__ = [
    "ALL_MODEL_NAMES",
    "MODEL_FACTORIES",
    "Recommender",
    "build_model",
    "TopPop",
    "AlsMF",
    "BPR",
    "UserKNN",
    "ItemKNN",
    "TransE",
    "TransH",
    "PPRRecommender",
    "GraphView",
    "label_propagate",
    "label_propagate_batch",
    "evaluate_label_propagation",
]
