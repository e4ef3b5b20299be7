"""Versioned binary model checkpoints.

Container: a .npz archive whose ``__meta__`` entry holds a JSON header
(format version, model name, constructor params, dataset fingerprint) and
whose remaining entries are the model's numeric state. See
docs/checkpoint-format.md for the layout contract.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import build_model

FORMAT_VERSION = 1

# Array attributes persisted per model class name.
_STATE_ATTRS = {
    "TopPop": ("counts",),
    "AlsMF": ("P", "Q"),
    "BPR": ("P", "Q"),
    "TransE": ("E", "R"),
    "TransH": ("E", "R", "W"),
}


class CheckpointError(ValueError):
    pass


def save_checkpoint(path: str | Path, model, params: dict | None = None) -> None:
    cls = type(model).__name__
    attrs = _STATE_ATTRS.get(cls)
    if attrs is None:
        raise CheckpointError(
            f"{cls} has no serialized state; refit it from the dataset instead"
        )
    meta = {
        "format_version": FORMAT_VERSION,
        "model": model.name,
        "params": params or {},
        "arrays": list(attrs),
        "n_users": len(model._train.user_keys),
        "n_entities": len(model._train.graph),
    }
    if cls in ("TransE", "TransH"):
        meta["n_users_offset"] = model.n_users
    payload = {a: getattr(model, a) for a in attrs}
    payload["__meta__"] = np.array(json.dumps(meta))
    np.savez_compressed(Path(path), **payload)


def load_checkpoint(path: str | Path, train, graph=None):
    """Rebuild a fitted model from a checkpoint, binding it to the given
    train store (needed for the uri tie rule and neighborhood lookups)."""
    with np.load(Path(path), allow_pickle=False) as archive:
        meta = json.loads(str(archive["__meta__"]))
        if meta.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {meta.get('format_version')}")
        if meta["n_entities"] != len(train.graph):
            raise CheckpointError("checkpoint was built against a different graph")
        model = build_model(meta["model"], **meta["params"])
        model._bind(train, graph)
        for name in meta["arrays"]:
            setattr(model, name, archive[name])
        if "n_users_offset" in meta:
            model.n_users = meta["n_users_offset"]
    return model
