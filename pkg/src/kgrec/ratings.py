"""Rating observations: loading, MR-ALL/MR-BIN views, per-user indexing.

Sentiments are encoded +1 (like), -1 (dislike), 0 (explicit unknown). Stores
are immutable; views and splits are produced by row filtering, and user ids
stay stable across views so train/test bookkeeping lines up.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .graph import KnowledgeGraph

LIKE = 1
DISLIKE = -1
UNKNOWN = 0

MR_ALL = "MR_ALL"
MR_BIN = "MR_BIN"


class RatingError(ValueError):
    """Malformed rating rows or constraint violations."""


class RatingStore:
    """Column-array store of (user, entity, sentiment, is_item) rows with a
    per-user index. ``user_keys`` maps dense user ids to export user ids and
    is shared by every view derived from the same load."""

    def __init__(
        self,
        users: np.ndarray,
        entities: np.ndarray,
        sentiments: np.ndarray,
        is_item: np.ndarray,
        user_keys: list[str],
        graph: KnowledgeGraph,
        variant: str = MR_ALL,
    ):
        order = np.argsort(users, kind="stable")
        self.users = users[order]
        self.entities = entities[order]
        self.sentiments = sentiments[order]
        self.is_item = is_item[order]
        self.user_keys = user_keys
        self.graph = graph
        self.variant = variant
        self._bounds = np.searchsorted(self.users, np.arange(len(user_keys) + 1))
        self._present = np.unique(self.users)

    def __len__(self) -> int:
        return len(self.users)

    @property
    def n_ratings(self) -> int:
        return len(self.users)

    @property
    def present_users(self) -> np.ndarray:
        """Dense ids of users with at least one row in this view."""
        return self._present

    @property
    def n_users(self) -> int:
        return len(self._present)

    def user_slice(self, user: int) -> slice:
        return slice(int(self._bounds[user]), int(self._bounds[user + 1]))

    def entities_of(self, user: int) -> np.ndarray:
        return self.entities[self.user_slice(user)]

    def sentiments_of(self, user: int) -> np.ndarray:
        return self.sentiments[self.user_slice(user)]

    def is_item_of(self, user: int) -> np.ndarray:
        return self.is_item[self.user_slice(user)]

    def liked(self, user: int) -> np.ndarray:
        sl = self.user_slice(user)
        return self.entities[sl][self.sentiments[sl] == LIKE]

    def disliked(self, user: int) -> np.ndarray:
        sl = self.user_slice(user)
        return self.entities[sl][self.sentiments[sl] == DISLIKE]

    def sentiment_of(self, user: int, entity: int) -> int | None:
        sl = self.user_slice(user)
        hits = np.flatnonzero(self.entities[sl] == entity)
        if len(hits) == 0:
            return None
        return int(self.sentiments[sl][hits[0]])

    def filter(self, mask: np.ndarray, variant: str | None = None) -> "RatingStore":
        return RatingStore(
            self.users[mask],
            self.entities[mask],
            self.sentiments[mask],
            self.is_item[mask],
            self.user_keys,
            self.graph,
            variant or self.variant,
        )

    def entity_rating_counts(self, binary_only: bool = True) -> np.ndarray:
        """Ratings per entity over the whole view (binary rows by default)."""
        mask = self.sentiments != UNKNOWN if binary_only else np.ones(len(self), dtype=bool)
        return np.bincount(self.entities[mask], minlength=len(self.graph))


def to_binary(store: RatingStore) -> RatingStore:
    """MR-BIN view: exactly the MR-ALL rows with a like/dislike sentiment."""
    if store.variant != MR_ALL:
        raise RatingError("to_binary expects an MR_ALL store")
    return store.filter(store.sentiments != UNKNOWN, variant=MR_BIN)


def load_ratings(ratings_file: str | Path, graph: KnowledgeGraph) -> RatingStore:
    """Load the ``user_id,entity_uri,is_item,sentiment`` export as MR-ALL.

    Duplicate (user, entity) pairs and unresolvable uris are rejected; the
    is_item flag must agree with the entity's recommendable flag.
    """
    path = Path(ratings_file)
    if not path.exists():
        raise FileNotFoundError(path)
    users: list[int] = []
    entities: list[int] = []
    sentiments: list[int] = []
    items: list[bool] = []
    key_to_id: dict[str, int] = {}
    user_keys: list[str] = []
    seen: set[tuple[int, int]] = set()

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != [
            "user_id",
            "entity_uri",
            "is_item",
            "sentiment",
        ]:
            raise RatingError(f"{path}:1: bad ratings header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise RatingError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            user_key, uri, item_s, sent_s = (c.strip() for c in row)
            if not graph.has_uri(uri):
                raise RatingError(f"{path}:{lineno}: unknown entity uri {uri!r}")
            eid = graph.id_of(uri)
            if item_s not in ("true", "false"):
                raise RatingError(f"{path}:{lineno}: is_item must be true/false, got {item_s!r}")
            is_item = item_s == "true"
            if is_item != bool(graph.recommendable_mask[eid]):
                raise RatingError(
                    f"{path}:{lineno}: is_item={item_s} disagrees with entity kind for {uri!r}"
                )
            try:
                sentiment = int(sent_s)
            except ValueError:
                raise RatingError(f"{path}:{lineno}: bad sentiment {sent_s!r}") from None
            if sentiment not in (LIKE, DISLIKE, UNKNOWN):
                raise RatingError(f"{path}:{lineno}: sentiment must be -1/0/1, got {sentiment}")
            uid = key_to_id.setdefault(user_key, len(user_keys))
            if uid == len(user_keys):
                user_keys.append(user_key)
            if (uid, eid) in seen:
                raise RatingError(f"{path}:{lineno}: duplicate rating for ({user_key!r}, {uri!r})")
            seen.add((uid, eid))
            users.append(uid)
            entities.append(eid)
            sentiments.append(sentiment)
            items.append(is_item)

    return RatingStore(
        np.array(users, dtype=np.int64),
        np.array(entities, dtype=np.int64),
        np.array(sentiments, dtype=np.int64),
        np.array(items, dtype=bool),
        user_keys,
        graph,
        MR_ALL,
    )
