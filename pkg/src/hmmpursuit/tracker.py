"""Live position tracking and cross-game knowledge.

The tracker keeps a running filtered belief over floor tiles, updated
one observation at a time, so a game session never recomputes the full
forward pass.  Completed games feed a knowledge store holding two
learned transition matrices: a long-term one fit to every archived
episode and a short-term one fit only to the most recent few, blended
for live play.
"""

import json
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .grid import GridMap, Position, random_transition, uniform_transition
from .hmm import (
    DIRECT_SIGHTING,
    NEGATIVE_INFO,
    BaumWelchOptions,
    BeliefVector,
    DimensionMismatch,
    InitialDistribution,
    ObservationSequence,
    ObservationVector,
    TransitionMatrix,
    baum_welch,
)

STORE_FORMAT_VERSION = 1


class StoreError(Exception):
    pass


class StoreFormatError(StoreError):
    """The store file is unreadable or declares an unsupported version."""


class StoreMapMismatch(StoreError):
    """The store was built for a different map than the one supplied."""


@dataclass(frozen=True, eq=False)
class TrackerState:
    """Running filtered belief for one game.

    ``alpha`` is the scaled forward vector (sums to 1), ``loglik`` the
    accumulated log of the per-step normalizers, ``turn`` the number of
    observations ingested so far.  Before the first observation the
    belief is the initial distribution itself.  ``last_collapsed`` marks
    whether the most recent update hit an all-zero step and recovered.
    """

    grid: GridMap
    matrix: TransitionMatrix
    mu: InitialDistribution
    alpha: np.ndarray
    loglik: float = 0.0
    turn: int = 0
    last_collapsed: bool = False

    @property
    def belief(self) -> BeliefVector:
        return BeliefVector(self.alpha)


def init_tracker(grid: GridMap, mu: InitialDistribution, matrix: TransitionMatrix) -> TrackerState:
    """Start tracking with belief equal to mu; nothing observed yet."""
    if mu.n != grid.n or matrix.n != grid.n:
        raise DimensionMismatch(
            f"mu has {mu.n} states, matrix {matrix.n}, map {grid.n}"
        )
    return TrackerState(grid=grid, matrix=matrix, mu=mu, alpha=mu.probs.copy())


def ingest_observation(tracker: TrackerState, obs: ObservationVector) -> TrackerState:
    """One forward step: transition the belief, weight it by obs, renormalize.

    The first observation weights mu directly, with no transition, so a
    point-mass start plus a consistent first observation stays one-hot.
    An all-zero step (the model ruled out every state the observation
    allows) recovers by resetting the belief to uniform over the states
    the observation still allows; ``last_collapsed`` flags the event and
    the step contributes nothing to ``loglik``.
    """
    if obs.n != tracker.grid.n:
        raise DimensionMismatch(f"observation has {obs.n} states, map {tracker.grid.n}")
    b = obs.values
    if tracker.turn == 0:
        v = tracker.mu.probs * b
    else:
        v = (tracker.alpha @ tracker.matrix.probs) * b
    s = float(v.sum())
    if s > 0.0:
        return replace(
            tracker,
            alpha=v / s,
            loglik=tracker.loglik + math.log(s),
            turn=tracker.turn + 1,
            last_collapsed=False,
        )
    # Collapse: fall back to the observation itself.  For negative-info
    # vectors that is uniform over everything not currently observed
    # empty; for a direct sighting it is one-hot at the sighted tile.
    return replace(
        tracker,
        alpha=b / b.sum(),
        turn=tracker.turn + 1,
        last_collapsed=True,
    )


def estimate_position(tracker: TrackerState) -> Position:
    """Most probable tile under the current belief; ties pick the lowest
    state index so the estimate is deterministic."""
    return tracker.grid.position_of(int(np.argmax(tracker.alpha)))


@dataclass(frozen=True, eq=False)
class KnowledgeStore:
    """Archived episodes plus the matrices learned from them.

    ``long_term`` is fit to every archived episode and warm-started from
    its previous value on each refit; ``short_term`` is refit from
    scratch on the most recent ``short_window`` episodes so it reacts
    fast when the opponent changes habits.  ``blend_lambda`` weights the
    long-term matrix in the live blend.
    """

    grid: GridMap
    episodes: tuple = ()
    long_term: Optional[TransitionMatrix] = None
    short_term: Optional[TransitionMatrix] = None
    blend_lambda: float = 0.5
    short_window: int = 3

    def __post_init__(self):
        if not 0.0 <= self.blend_lambda <= 1.0:
            raise ValueError("blend_lambda must lie in [0, 1]")
        if self.short_window < 1:
            raise ValueError("short_window must be positive")
        if self.long_term is None:
            object.__setattr__(self, "long_term", uniform_transition(self.grid))
        if self.short_term is None:
            object.__setattr__(self, "short_term", uniform_transition(self.grid))
        object.__setattr__(self, "episodes", tuple(self.episodes))


def archive_episode(store: KnowledgeStore, seq: ObservationSequence) -> KnowledgeStore:
    if seq.n != store.grid.n:
        raise DimensionMismatch(f"episode has {seq.n} states, map {store.grid.n}")
    return replace(store, episodes=store.episodes + (seq,))


def learn(
    store: KnowledgeStore,
    mu: InitialDistribution,
    opts: Optional[BaumWelchOptions] = None,
    rng: Optional[np.random.Generator] = None,
) -> KnowledgeStore:
    """Refit both matrices from the archive.

    Long-term: all episodes, seeded from the previous long-term matrix.
    Short-term: the last ``short_window`` episodes, refit from scratch
    each time; its restart point is the uniform matrix, or a random
    stochastic matrix on the same support when ``rng`` is given
    (randomized restarts, since re-estimation only finds a local
    optimum).  Raises ValueError when nothing has been archived yet.
    """
    if not store.episodes:
        raise ValueError("cannot learn from an empty archive")
    if opts is None:
        opts = BaumWelchOptions()
    long_fit = baum_welch(store.episodes, mu, store.long_term, opts)
    recent = store.episodes[-store.short_window :]
    if rng is None:
        short_seed = uniform_transition(store.grid)
    else:
        short_seed = random_transition(store.grid, rng)
    short_fit = baum_welch(recent, mu, short_seed, opts)
    return replace(store, long_term=long_fit.a_hat, short_term=short_fit.a_hat)


def blended_matrix(store: KnowledgeStore) -> TransitionMatrix:
    """Convex combination lambda*long + (1-lambda)*short; rows stay
    stochastic and the support is the shared structural support."""
    lam = store.blend_lambda
    mixed = lam * store.long_term.probs + (1.0 - lam) * store.short_term.probs
    support = store.long_term.support_mask() | store.short_term.support_mask()
    return TransitionMatrix(mixed, support=support)


def encode_observation(step: ObservationVector) -> dict:
    if step.kind == DIRECT_SIGHTING:
        return {"kind": "sighting", "state": int(step.sighted_state)}
    zeros = np.flatnonzero(step.values == 0.0)
    return {"kind": "empty-set", "zeros": [int(i) for i in zeros]}


def decode_observation(record: dict, n: int) -> ObservationVector:
    kind = record.get("kind")
    if kind == "sighting":
        values = np.zeros(n)
        values[record["state"]] = 1.0
        return ObservationVector(values, kind=DIRECT_SIGHTING)
    if kind == "empty-set":
        values = np.ones(n)
        values[record["zeros"]] = 0.0
        return ObservationVector(values, kind=NEGATIVE_INFO)
    raise StoreFormatError(f"unknown observation record kind {kind!r}")


def _encode_matrix(m: TransitionMatrix) -> list:
    return [[float(x) for x in row] for row in m.probs]


def save_store(store: KnowledgeStore, path) -> None:
    """Write the store as a versioned JSON document.

    Floats serialize through repr, which round-trips float64 exactly in
    at most 17 significant digits, so save then load is bit-identical.
    """
    doc = {
        "version": STORE_FORMAT_VERSION,
        "map_hash": store.grid.map_hash,
        "lambda": store.blend_lambda,
        "short_window": store.short_window,
        "episodes": [[encode_observation(s) for s in ep] for ep in store.episodes],
        "long_term": _encode_matrix(store.long_term),
        "short_term": _encode_matrix(store.short_term),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_store(path, grid: GridMap) -> KnowledgeStore:
    """Read a store written by save_store, bound to the given map.

    Raises StoreFormatError on malformed documents or version mismatch
    and StoreMapMismatch when the file was built for another map.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise StoreFormatError(f"unreadable store file: {exc}") from exc
    if not isinstance(doc, dict) or "version" not in doc:
        raise StoreFormatError("store file has no version header")
    if doc["version"] != STORE_FORMAT_VERSION:
        raise StoreFormatError(
            f"store version {doc['version']!r} unsupported "
            f"(expected {STORE_FORMAT_VERSION})"
        )
    if doc.get("map_hash") != grid.map_hash:
        raise StoreMapMismatch(
            "store was built for a different map "
            f"({doc.get('map_hash')!r} != {grid.map_hash!r})"
        )
    support = uniform_transition(grid).support_mask()
    try:
        episodes = tuple(
            ObservationSequence(tuple(decode_observation(r, grid.n) for r in ep))
            for ep in doc["episodes"]
        )
        long_term = TransitionMatrix(np.array(doc["long_term"]), support=support)
        short_term = TransitionMatrix(np.array(doc["short_term"]), support=support)
        return KnowledgeStore(
            grid=grid,
            episodes=episodes,
            long_term=long_term,
            short_term=short_term,
            blend_lambda=float(doc["lambda"]),
            short_window=int(doc["short_window"]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise StoreFormatError(f"malformed store body: {exc}") from exc
