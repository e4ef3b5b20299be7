"""Three-phase preference-elicitation interview.

A session moves Initial -> Exploration -> Recommendation -> Done, collecting
like/dislike/unknown answers on 9-entity batches. The same engine drives the
HTTP service and offline replay with simulated users.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .graph import KnowledgeGraph
from .pagerank import PageRankScores, global_pagerank
from .ratings import DISLIKE, LIKE, UNKNOWN, RatingStore
from .sampling import (
    MovieMeta,
    exploration_sample,
    movie_weight,
    recommendation_candidates,
    weighted_sample,
)


class Phase(str, Enum):
    INITIAL = "initial"
    EXPLORATION = "exploration"
    RECOMMENDATION = "recommendation"
    DONE = "done"


class InterviewError(ValueError):
    pass


class InterviewExhausted(InterviewError):
    """Not enough unasked entities to build the next batch."""


class BatchMismatch(InterviewError):
    """Submitted answers do not cover the pending batch exactly."""


@dataclass
class InterviewConfig:
    batch_size: int = 9
    group_size: int = 3
    binary_target: int = 30
    final_list_size: int = 9
    extras_size: int = 9
    weight_reference_year: int = 2000
    damping: float = 0.85
    pagerank_tol: float = 1e-8
    pagerank_max_iters: int = 200


@dataclass
class InterviewSession:
    session_id: str
    token: str
    rng_seed: int
    phase: Phase
    liked: set[int] = field(default_factory=set)
    disliked: set[int] = field(default_factory=set)
    unknown: set[int] = field(default_factory=set)
    asked: set[int] = field(default_factory=set)
    pending_batch: list[int] = field(default_factory=list)
    batch_number: int = 0
    exclude: frozenset[int] = frozenset()
    truncated: bool = False
    final: tuple[list[int], list[int], list[int]] | None = None
    transcript: list[tuple[int, list[tuple[int, int]]]] = field(default_factory=list)
    rng: np.random.Generator = field(default=None, repr=False)  # type: ignore[assignment]

    @property
    def binary_count(self) -> int:
        return len(self.liked) + len(self.disliked)

    @property
    def blocked(self) -> set[int]:
        """Entities that may not appear in any future batch of this session."""
        return self.asked | set(self.exclude) | set(self.pending_batch)


class InterviewEngine:
    """Builds batches and advances sessions over one loaded graph/popularity pair."""

    def __init__(
        self,
        graph: KnowledgeGraph,
        popularity: dict[int, MovieMeta],
        config: InterviewConfig | None = None,
    ):
        self.graph = graph
        self.config = config or InterviewConfig()
        self._weights = {
            meta.entity: movie_weight(meta, self.config.weight_reference_year)
            for meta in popularity.values()
            if graph.recommendable_mask[meta.entity]
        }
        self._scores: PageRankScores | None = None

    @property
    def scores(self) -> PageRankScores:
        if self._scores is None:
            cfg = self.config
            self._scores = global_pagerank(
                self.graph, cfg.damping, cfg.pagerank_tol, cfg.pagerank_max_iters
            )
        return self._scores

    # -- batch builders ------------------------------------------------------

    def _movie_pool(self, blocked: set[int]) -> list[tuple[int, float]]:
        return [(e, w) for e, w in self._weights.items() if w > 0 and e not in blocked]

    def _movie_sample(self, blocked: set[int], size: int, rng: np.random.Generator) -> list[int]:
        pool = self._movie_pool(blocked)
        if not pool:
            return []
        return weighted_sample(pool, min(size, len(pool)), rng)

    def new_session(
        self,
        token: str,
        rng_seed: int,
        exclude: frozenset[int] = frozenset(),
        session_id: str | None = None,
    ) -> InterviewSession:
        rng = np.random.default_rng(rng_seed)
        pool = self._movie_pool(set(exclude))
        if len(pool) < self.config.batch_size:
            raise InterviewExhausted(
                f"only {len(pool)} eligible movies; need {self.config.batch_size}"
            )
        session = InterviewSession(
            session_id=session_id or uuid.uuid4().hex,
            token=token,
            rng_seed=rng_seed,
            phase=Phase.INITIAL,
            exclude=exclude,
            rng=rng,
        )
        session.pending_batch = weighted_sample(pool, self.config.batch_size, rng)
        return session

    def exploration_batch(self, session: InterviewSession) -> list[int]:
        """Three independent 3-entity sets: adjacent to dislikes, adjacent to
        likes, and popularity-weighted movies; shortfalls are backfilled from
        the popularity-weighted pool."""
        if session.phase != Phase.EXPLORATION:
            raise InterviewError(f"exploration batch requested in phase {session.phase}")
        cfg = self.config
        blocked = session.asked | set(session.exclude)
        picks: list[int] = []

        for seed_set in (session.disliked, session.liked):
            adjacent: set[int] = set()
            for seed in seed_set:
                adjacent |= self.graph.neighbors(seed, "both")
            adjacent -= blocked
            adjacent -= set(picks)
            if adjacent:
                picks.extend(
                    exploration_sample(self.graph, self.scores, adjacent, cfg.group_size, session.rng)
                )
        picks.extend(self._movie_sample(blocked | set(picks), cfg.group_size, session.rng))

        shortfall = cfg.batch_size - len(picks)
        if shortfall > 0:
            picks.extend(self._movie_sample(blocked | set(picks), shortfall, session.rng))
        if len(picks) < cfg.batch_size:
            raise InterviewExhausted("cannot assemble a full exploration batch")
        return picks

    def final_lists(
        self, session: InterviewSession, n_per_list: int | None = None
    ) -> tuple[list[int], list[int], list[int]]:
        """(predicted liked, predicted disliked, random extras); computed once
        per session and cached since the draw consumes the session rng."""
        if session.phase not in (Phase.RECOMMENDATION, Phase.DONE):
            raise InterviewError(f"final lists requested in phase {session.phase}")
        if session.final is not None:
            return session.final
        cfg = self.config
        n = n_per_list or cfg.final_list_size
        blocked = session.asked | set(session.exclude)

        predicted_liked: list[int] = []
        if session.liked:
            predicted_liked = recommendation_candidates(
                self.graph, self.scores, session.liked, n, session.rng, exclude=blocked
            )
        predicted_disliked: list[int] = []
        if session.disliked:
            predicted_disliked = recommendation_candidates(
                self.graph,
                self.scores,
                session.disliked,
                n,
                session.rng,
                exclude=blocked | set(predicted_liked),
            )
        extras = self._movie_sample(
            blocked | set(predicted_liked) | set(predicted_disliked),
            cfg.extras_size,
            session.rng,
        )
        session.final = (predicted_liked, predicted_disliked, extras)
        return session.final

    # -- session advancement ---------------------------------------------------

    def submit_batch(
        self, session: InterviewSession, answers: list[tuple[int, int]]
    ) -> InterviewSession:
        """Apply a fully-answered batch, evaluate the phase transition, and
        stage the next batch."""
        if session.phase == Phase.DONE:
            raise InterviewError("session is already done")
        expected = set(session.pending_batch)
        given = [e for e, _ in answers]
        if len(given) != len(session.pending_batch) or set(given) != expected or len(set(given)) != len(given):
            raise BatchMismatch("answers must cover the pending batch exactly once each")
        for entity, sentiment in answers:
            if sentiment not in (LIKE, DISLIKE, UNKNOWN):
                raise InterviewError(f"bad sentiment {sentiment} for entity {entity}")

        for entity, sentiment in answers:
            target = {LIKE: session.liked, DISLIKE: session.disliked, UNKNOWN: session.unknown}[
                sentiment
            ]
            target.add(entity)
        session.asked.update(expected)
        session.transcript.append((session.batch_number, list(answers)))
        session.batch_number += 1
        session.pending_batch = []

        if session.phase == Phase.RECOMMENDATION:
            session.phase = Phase.DONE
            return session

        if session.phase == Phase.INITIAL and session.binary_count >= 1:
            session.phase = Phase.EXPLORATION
        if session.phase == Phase.EXPLORATION and session.binary_count >= self.config.binary_target:
            session.phase = Phase.RECOMMENDATION

        try:
            if session.phase == Phase.INITIAL:
                batch = self._movie_sample(session.blocked, self.config.batch_size, session.rng)
                if len(batch) < self.config.batch_size:
                    raise InterviewExhausted("movie pool exhausted")
                session.pending_batch = batch
            elif session.phase == Phase.EXPLORATION:
                session.pending_batch = self.exploration_batch(session)
            else:
                liked_list, disliked_list, extras = self.final_lists(session)
                pending = liked_list + disliked_list + extras
                if not pending:
                    raise InterviewExhausted("no recommendable entities left to show")
                session.pending_batch = pending
        except InterviewExhausted:
            session.phase = Phase.DONE
            session.truncated = True
            session.pending_batch = []
        return session

    def replay_with_oracle(
        self, store: RatingStore, user: int, rng_seed: int
    ) -> InterviewSession:
        """Run a full interview answering each entity with the user's recorded
        sentiment (explicit unknown when unrecorded). Always terminates; pool
        exhaustion sets the truncation flag."""
        sl = store.user_slice(user)
        oracle = dict(zip(store.entities[sl].tolist(), store.sentiments[sl].tolist()))
        token = f"user-{store.user_keys[user]}"
        try:
            session = self.new_session(token, rng_seed)
        except InterviewExhausted:
            session = InterviewSession(
                session_id=uuid.uuid4().hex,
                token=token,
                rng_seed=rng_seed,
                phase=Phase.DONE,
                truncated=True,
                rng=np.random.default_rng(rng_seed),
            )
            return session
        while session.phase != Phase.DONE:
            answers = [(e, oracle.get(e, UNKNOWN)) for e in session.pending_batch]
            self.submit_batch(session, answers)
        return session
