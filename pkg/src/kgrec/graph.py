"""Knowledge-graph store: typed entities and edges, loading, validation,
structural statistics, and adjacency queries.

The graph is immutable after load and held as forward/reverse adjacency over
dense integer ids, so concurrent readers are safe.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np

KINDS = ("Movie", "Person", "Genre", "Subject", "Category", "Decade", "Company")

#: Relation vocabulary used by the bundled datasets; external datasets declare
#: theirs in the sidecar manifest.
DEFAULT_RELATIONS = (
    "HAS_GENRE",
    "STARRING",
    "DIRECTED_BY",
    "PRODUCED_BY",
    "FROM_DECADE",
    "HAS_SUBJECT",
    "SUBCLASS_OF",
    "FOLLOWED_BY",
)


class GraphError(ValueError):
    """Malformed input files or invariant violations during load."""


@dataclass(frozen=True)
class Entity:
    id: int
    uri: str
    name: str
    kind: str
    recommendable: bool


@dataclass(frozen=True)
class Edge:
    head: int
    relation: str
    tail: int


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    kind_counts: dict[str, int]
    edge_count: int
    min_degree: int
    median_degree: float
    mean_degree: float
    max_degree: int
    component_count: int


class KnowledgeGraph:
    """Labelled directed multigraph over recommendable and descriptive entities."""

    def __init__(self, entities: list[Entity], edges: list[Edge], relations: tuple[str, ...]):
        self.entities = entities
        self.edges = edges
        self.relations = relations
        self._by_uri = {e.uri: e.id for e in entities}
        n = len(entities)
        self.uris = np.array([e.uri for e in entities], dtype=object)
        self.kinds = np.array([e.kind for e in entities], dtype=object)
        self.recommendable_mask = np.array([e.recommendable for e in entities], dtype=bool)

        heads = np.fromiter((e.head for e in edges), dtype=np.int64, count=len(edges))
        tails = np.fromiter((e.tail for e in edges), dtype=np.int64, count=len(edges))
        self._heads = heads
        self._tails = tails
        self._out = _group_by(heads, tails, n)
        self._in = _group_by(tails, heads, n)
        self._pagerank_cache: dict[tuple[float, float, int], object] = {}

    # -- basic accessors ---------------------------------------------------

    def __len__(self) -> int:
        return len(self.entities)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def entity(self, entity_id: int) -> Entity:
        self._check_id(entity_id)
        return self.entities[entity_id]

    def id_of(self, uri: str) -> int:
        try:
            return self._by_uri[uri]
        except KeyError:
            raise GraphError(f"unknown entity uri: {uri!r}") from None

    def has_uri(self, uri: str) -> bool:
        return uri in self._by_uri

    @property
    def recommendable_ids(self) -> np.ndarray:
        return np.flatnonzero(self.recommendable_mask)

    def ids_of_kind(self, kind: str) -> np.ndarray:
        return np.flatnonzero(self.kinds == kind)

    def _check_id(self, entity_id: int) -> None:
        if not 0 <= entity_id < len(self.entities):
            raise GraphError(f"unknown entity id: {entity_id}")

    # -- queries -----------------------------------------------------------

    def neighbors(self, entity_id: int, direction: str = "both") -> set[int]:
        """Deduplicated 1-hop neighbor ids in the requested direction."""
        self._check_id(entity_id)
        if direction == "out":
            return set(self._out[entity_id].tolist())
        if direction == "in":
            return set(self._in[entity_id].tolist())
        if direction == "both":
            return set(self._out[entity_id].tolist()) | set(self._in[entity_id].tolist())
        raise ValueError(f"direction must be out/in/both, got {direction!r}")

    def out_neighbors_array(self, entity_id: int) -> np.ndarray:
        return self._out[entity_id]

    def in_neighbors_array(self, entity_id: int) -> np.ndarray:
        return self._in[entity_id]

    def undirected_degrees(self) -> np.ndarray:
        """Incident typed-edge count per node (each edge counts at both ends)."""
        deg = np.bincount(self._heads, minlength=len(self.entities))
        deg += np.bincount(self._tails, minlength=len(self.entities))
        return deg

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(sources, destinations) of the directed typed-arc multiset."""
        return self._heads, self._tails


def _group_by(keys: np.ndarray, values: np.ndarray, n: int) -> list[np.ndarray]:
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    sorted_vals = values[order]
    bounds = np.searchsorted(sorted_keys, np.arange(n + 1))
    return [sorted_vals[bounds[i]:bounds[i + 1]] for i in range(n)]


# -- loading -----------------------------------------------------------------


def _read_relation_manifest(path: Path) -> tuple[str, ...]:
    names = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    if not names:
        raise GraphError(f"relation manifest {path} is empty")
    return tuple(names)


def load_graph(
    entities_file: str | Path,
    triples_file: str | Path,
    relations_file: str | Path | None = None,
    prune_single_link: bool = False,
) -> KnowledgeGraph:
    """Load a graph from the entities/triples CSV pair.

    Entities: header ``uri,name,kind,recommendable``. Triples: header
    ``head_uri,relation,tail_uri`` with the relation vocabulary declared in a
    sidecar manifest (``<triples_file>.relations`` by default, one name per
    line). With ``prune_single_link`` the loader iteratively removes entities
    participating in at most one edge until a fixpoint, then assigns dense ids
    in file order.
    """
    entities_file = Path(entities_file)
    triples_file = Path(triples_file)
    for p in (entities_file, triples_file):
        if not p.exists():
            raise FileNotFoundError(p)

    if relations_file is None:
        sidecar = Path(str(triples_file) + ".relations")
        relations = _read_relation_manifest(sidecar) if sidecar.exists() else None
    else:
        relations = _read_relation_manifest(Path(relations_file))

    rows = _read_entity_rows(entities_file)
    triple_rows = _read_triple_rows(triples_file, {r[0] for r in rows}, relations)
    if relations is None:
        relations = tuple(sorted({rel for _, rel, _ in triple_rows}))

    if prune_single_link:
        rows, triple_rows = _prune(rows, triple_rows, entities_file)

    entities = [
        Entity(i, uri, name, kind, rec) for i, (uri, name, kind, rec) in enumerate(rows)
    ]
    by_uri = {e.uri: e.id for e in entities}
    edges = [Edge(by_uri[h], rel, by_uri[t]) for h, rel, t in triple_rows]
    return KnowledgeGraph(entities, edges, relations)


def _read_entity_rows(path: Path) -> list[tuple[str, str, str, bool]]:
    rows: list[tuple[str, str, str, bool]] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["uri", "name", "kind", "recommendable"]:
            raise GraphError(f"{path}:1: bad entities header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise GraphError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            uri, name, kind, rec_s = (c.strip() for c in row)
            if uri in seen:
                raise GraphError(f"{path}:{lineno}: duplicate uri {uri!r}")
            if kind not in KINDS:
                raise GraphError(f"{path}:{lineno}: unknown kind {kind!r}")
            if rec_s not in ("true", "false"):
                raise GraphError(f"{path}:{lineno}: recommendable must be true/false, got {rec_s!r}")
            rec = rec_s == "true"
            if rec != (kind == "Movie"):
                raise GraphError(
                    f"{path}:{lineno}: recommendable must be true exactly for Movie entities"
                )
            seen.add(uri)
            rows.append((uri, name, kind, rec))
    return rows


def _read_triple_rows(
    path: Path, known_uris: set[str], relations: tuple[str, ...] | None
) -> list[tuple[str, str, str]]:
    triples: list[tuple[str, str, str]] = []
    vocab = set(relations) if relations is not None else None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["head_uri", "relation", "tail_uri"]:
            raise GraphError(f"{path}:1: bad triples header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise GraphError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            head, rel, tail = (c.strip() for c in row)
            if head not in known_uris:
                raise GraphError(f"{path}:{lineno}: dangling head uri {head!r}")
            if tail not in known_uris:
                raise GraphError(f"{path}:{lineno}: dangling tail uri {tail!r}")
            if vocab is not None and rel not in vocab:
                raise GraphError(f"{path}:{lineno}: unknown relation type {rel!r}")
            triples.append((head, rel, tail))
    return triples


def _prune(
    rows: list[tuple[str, str, str, bool]],
    triples: list[tuple[str, str, str]],
    source: Path,
) -> tuple[list[tuple[str, str, str, bool]], list[tuple[str, str, str]]]:
    alive = {r[0] for r in rows}
    while True:
        deg: dict[str, int] = dict.fromkeys(alive, 0)
        kept = [(h, r, t) for h, r, t in triples if h in alive and t in alive]
        for h, _, t in kept:
            deg[h] += 1
            deg[t] += 1
        doomed = {uri for uri, d in deg.items() if d <= 1}
        if not doomed:
            triples = kept
            break
        alive -= doomed
        triples = kept
    if not alive:
        raise GraphError(f"{source}: pruning removed every entity (degenerate input)")
    return [r for r in rows if r[0] in alive], triples


# -- structural statistics ----------------------------------------------------


def connected_components(graph: KnowledgeGraph) -> list[set[int]]:
    """Partition node ids under undirected reachability, ordered by smallest member."""
    n = len(graph)
    if n == 0:
        return []
    parent = np.arange(n)

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    heads, tails = graph.arc_arrays()
    for h, t in zip(heads.tolist(), tails.tolist()):
        ra, rb = find(h), find(t)
        if ra != rb:
            parent[rb] = ra

    comps: dict[int, set[int]] = {}
    for node in range(n):
        comps.setdefault(find(node), set()).add(node)
    return sorted(comps.values(), key=min)


def degree_stats(graph: KnowledgeGraph) -> GraphStats:
    """Structural statistics on the undirected typed-edge view."""
    if len(graph) == 0:
        raise GraphError("degree_stats requires a non-empty graph")
    deg = graph.undirected_degrees()
    kind_counts = {k: int((graph.kinds == k).sum()) for k in KINDS if (graph.kinds == k).any()}
    return GraphStats(
        node_count=len(graph),
        kind_counts=kind_counts,
        edge_count=graph.num_edges,
        min_degree=int(deg.min()),
        median_degree=float(statistics.median(deg.tolist())),
        mean_degree=float(deg.mean()),
        max_degree=int(deg.max()),
        component_count=len(connected_components(graph)),
    )
