"""Turn-based pursuit game loop.

One turn runs in a fixed order: the agent moves, the agent win
condition is checked, the AI observes and updates its belief, the AI
moves one step toward its estimate, the touch condition is checked,
and the turn is recorded.  The same stepper drives scripted experiment
games and interactive sessions, so both produce identical logs for
identical move sequences.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import (
    GridMap,
    IllegalMove,
    MoveAction,
    Position,
    VisibilitySpec,
    apply_move,
    observation_vector,
    visible_set,
)
from .hmm import InitialDistribution, ObservationSequence, TransitionMatrix
from .pathfind import dijkstra, next_move
from .tracker import (
    KnowledgeStore,
    TrackerState,
    archive_episode,
    decode_observation,
    encode_observation,
    estimate_position,
    ingest_observation,
    init_tracker,
)

AGENT_WON = "agent_won"
AI_WON = "ai_won"
TURN_LIMIT = "turn_limit"
RESIGNED = "resigned"

TOUCH_ADJACENT4 = "adjacent4"
TOUCH_SAME_TILE = "same_tile"


class GameError(Exception):
    pass


class ScriptIllegalMove(GameError):
    """A scripted strategy tried a move the map forbids."""

    def __init__(self, strategy_name: str, turn: int, action: MoveAction):
        self.strategy_name = strategy_name
        self.turn = turn
        self.action = action
        super().__init__(
            f"strategy {strategy_name!r} move {action.name} illegal at turn {turn}"
        )


@dataclass(frozen=True)
class GameRules:
    """Tunable game parameters.

    ``occupy_turns_to_win`` counts consecutive turns the agent ends on a
    goal tile, including the arrival turn.  ``touch_rule`` adjacent4
    means the AI wins when it ends its move on the agent's tile or a
    cardinally adjacent one.
    """

    player_vision_radius: int = 2
    ai_vision_radius: int = 1
    occupy_turns_to_win: int = 3
    touch_rule: str = TOUCH_ADJACENT4
    max_turns: int = 200

    def __post_init__(self):
        if self.occupy_turns_to_win < 1 or self.max_turns < 1:
            raise ValueError("win counts must be positive")
        if self.ai_vision_radius < 0 or self.player_vision_radius < 0:
            raise ValueError("vision radii must be non-negative")
        if self.touch_rule not in (TOUCH_ADJACENT4, TOUCH_SAME_TILE):
            raise ValueError(f"unknown touch rule {self.touch_rule!r}")


@dataclass(frozen=True)
class ScriptedStrategy:
    """A fixed move script for the agent, staying put once exhausted."""

    name: str
    moves: tuple

    def move_at(self, index: int) -> MoveAction:
        if index < len(self.moves):
            return self.moves[index]
        return MoveAction.STAY

    @classmethod
    def from_string(cls, name: str, text: str) -> "ScriptedStrategy":
        return cls(name=name, moves=tuple(MoveAction.from_char(c) for c in text))


@dataclass(frozen=True, eq=False)
class TurnRecord:
    turn: int
    agent_pos: Position
    ai_pos: Position
    w: tuple
    sighting: Optional[Position]
    belief_argmax: Position
    belief_argmax_prob: float
    distance: float
    collapsed: bool


@dataclass(frozen=True, eq=False)
class EpisodeLog:
    """Everything needed to audit or replay one completed game.

    The transition matrix and initial distribution the tracker played
    with are embedded so beliefs can be recomputed offline from the
    archived observation sequence alone.
    """

    map_hash: str
    outcome: str
    records: tuple
    observation_sequence: Optional[ObservationSequence]
    matrix: np.ndarray
    mu: np.ndarray
    belief_snapshots: Optional[tuple] = None


def _touched(rules: GameRules, agent: Position, ai: Position) -> bool:
    if rules.touch_rule == TOUCH_SAME_TILE:
        return agent == ai
    return abs(agent.x - ai.x) + abs(agent.y - ai.y) <= 1


def euclidean(a: Position, b: Position) -> float:
    return math.dist(a, b)


class PursuitGame:
    """Mutable single-game stepper.

    Drive it with one agent MoveAction per turn; it advances the whole
    turn (observation, AI move, win checks) and appends a TurnRecord.
    ``outcome`` stays None until the game ends.
    """

    def __init__(
        self,
        grid: GridMap,
        rules: GameRules,
        tracker: TrackerState,
        record_beliefs: bool = False,
    ):
        self.grid = grid
        self.rules = rules
        self.tracker = tracker
        self.agent_pos = grid.player_start
        self.ai_pos = grid.ai_start
        self.turn = 0
        self.occupy_streak = 0
        self.outcome: Optional[str] = None
        self.records: list = []
        self.observations: list = []
        self.belief_snapshots: Optional[list] = [] if record_beliefs else None
        # The AI looks at the board once before anyone moves.  This
        # anchors observation t to the agent's position after t-1 moves,
        # so the agent's true trajectory always carries positive
        # probability and archived games can never become impossible
        # under the adjacency support.
        self._observe()

    @property
    def finished(self) -> bool:
        return self.outcome is not None

    def step(self, action: MoveAction) -> TurnRecord:
        """Advance one full turn.  Raises IllegalMove (before any state
        change) if the agent action is not legal from its tile."""
        if self.finished:
            raise GameError("game already finished")
        new_agent = apply_move(self.grid, self.agent_pos, action)

        self.turn += 1
        self.agent_pos = new_agent
        if self.agent_pos in self.grid.goals:
            self.occupy_streak += 1
        else:
            self.occupy_streak = 0

        if self.occupy_streak >= self.rules.occupy_turns_to_win:
            # Agent win ends the turn before the AI acts: no observation
            # this turn, the logged belief is the previous turn's.
            self.outcome = AGENT_WON
            record = self._record(w=frozenset(), sighting=None)
            self.records.append(record)
            return record

        w, sighting = self._observe()

        target = estimate_position(self.tracker)
        self.ai_pos = apply_move(
            self.grid, self.ai_pos, next_move(self.grid, self.ai_pos, target)
        )

        if _touched(self.rules, self.agent_pos, self.ai_pos):
            self.outcome = AI_WON
        elif self.turn >= self.rules.max_turns:
            self.outcome = TURN_LIMIT

        record = self._record(w=w, sighting=sighting)
        self.records.append(record)
        return record

    def _observe(self):
        w = visible_set(
            self.grid,
            self.ai_pos,
            VisibilitySpec(radius=self.rules.ai_vision_radius),
            cameras_active=True,
        )
        sighting = self.agent_pos if self.agent_pos in w else None
        obs = observation_vector(self.grid, w, sighting=sighting)
        self.tracker = ingest_observation(self.tracker, obs)
        self.observations.append(obs)
        if self.belief_snapshots is not None:
            self.belief_snapshots.append(self.tracker.alpha.copy())
        return w, sighting

    def _record(self, w, sighting) -> TurnRecord:
        argmax = estimate_position(self.tracker)
        return TurnRecord(
            turn=self.turn,
            agent_pos=self.agent_pos,
            ai_pos=self.ai_pos,
            w=tuple(sorted(w)),
            sighting=sighting,
            belief_argmax=argmax,
            belief_argmax_prob=float(self.tracker.alpha.max()),
            distance=euclidean(self.agent_pos, argmax),
            collapsed=self.tracker.last_collapsed,
        )

    def resign(self) -> None:
        if self.finished:
            raise GameError("game already finished")
        self.outcome = RESIGNED

    def to_log(self) -> EpisodeLog:
        if not self.finished:
            raise GameError("game still in progress")
        seq = (
            ObservationSequence(tuple(self.observations))
            if self.observations
            else None
        )
        return EpisodeLog(
            map_hash=self.grid.map_hash,
            outcome=self.outcome,
            records=tuple(self.records),
            observation_sequence=seq,
            matrix=self.tracker.matrix.probs,
            mu=self.tracker.mu.probs,
            belief_snapshots=(
                tuple(self.belief_snapshots)
                if self.belief_snapshots is not None
                else None
            ),
        )


def run_game(
    grid: GridMap,
    rules: GameRules,
    strategy: ScriptedStrategy,
    tracker: TrackerState,
    store: KnowledgeStore,
    record_heatmaps: bool = False,
):
    """Play one scripted game to completion.

    Returns (EpisodeLog, updated KnowledgeStore); the episode's
    observation sequence is archived into the store.  A script move the
    map forbids raises ScriptIllegalMove without archiving anything.
    """
    game = PursuitGame(grid, rules, tracker, record_beliefs=record_heatmaps)
    index = 0
    while not game.finished:
        action = strategy.move_at(index)
        try:
            game.step(action)
        except IllegalMove as exc:
            raise ScriptIllegalMove(strategy.name, game.turn + 1, action) from exc
        index += 1
    log = game.to_log()
    if log.observation_sequence is not None:
        store = archive_episode(store, log.observation_sequence)
    return log, store


def mean_estimate_distance(
    log: EpisodeLog,
    metric: str = "euclidean",
    include_sighted: bool = True,
    grid: Optional[GridMap] = None,
) -> float:
    """Mean distance between the agent and the logged belief argmax.

    Euclidean between tile centers by default; metric="path" uses
    shortest-path distance and needs the map.  include_sighted=False
    drops turns where the AI saw the agent directly.
    """
    records = [
        r for r in log.records if include_sighted or r.sighting is None
    ]
    if not records:
        raise ValueError("no turns to average over")
    if metric == "euclidean":
        return float(np.mean([r.distance for r in records]))
    if metric == "path":
        if grid is None:
            raise ValueError("path metric needs the map")
        total = 0.0
        for r in records:
            field = dijkstra(grid, r.agent_pos)
            total += float(field.dist[grid.index_of(r.belief_argmax)])
        return total / len(records)
    raise ValueError(f"unknown metric {metric!r}")


def replay_beliefs(log: EpisodeLog, grid: GridMap) -> list:
    """Recompute the per-observation beliefs from the archived sequence
    and the embedded matrix, for offline audit of the logged estimates."""
    if log.map_hash != grid.map_hash:
        raise ValueError("log was recorded on a different map")
    if log.observation_sequence is None:
        return []
    tracker = init_tracker(
        grid,
        InitialDistribution(log.mu),
        TransitionMatrix(log.matrix),
    )
    beliefs = []
    for obs in log.observation_sequence:
        tracker = ingest_observation(tracker, obs)
        beliefs.append(tracker.alpha.copy())
    return beliefs


def _pos_json(pos: Optional[Position]):
    return None if pos is None else [pos.x, pos.y]


def _pos_from_json(value) -> Optional[Position]:
    return None if value is None else Position(int(value[0]), int(value[1]))


def log_to_json(log: EpisodeLog) -> dict:
    return {
        "map_hash": log.map_hash,
        "outcome": log.outcome,
        "matrix": [[float(x) for x in row] for row in log.matrix],
        "mu": [float(x) for x in log.mu],
        "records": [
            {
                "turn": r.turn,
                "agent_pos": _pos_json(r.agent_pos),
                "ai_pos": _pos_json(r.ai_pos),
                "w": [_pos_json(p) for p in r.w],
                "sighting": _pos_json(r.sighting),
                "belief_argmax": _pos_json(r.belief_argmax),
                "belief_argmax_prob": r.belief_argmax_prob,
                "distance": r.distance,
                "collapsed": r.collapsed,
            }
            for r in log.records
        ],
        "observations": (
            [encode_observation(o) for o in log.observation_sequence]
            if log.observation_sequence is not None
            else []
        ),
        "belief_snapshots": (
            [[float(x) for x in b] for b in log.belief_snapshots]
            if log.belief_snapshots is not None
            else None
        ),
    }


def log_from_json(doc: dict, grid: GridMap) -> EpisodeLog:
    records = tuple(
        TurnRecord(
            turn=int(r["turn"]),
            agent_pos=_pos_from_json(r["agent_pos"]),
            ai_pos=_pos_from_json(r["ai_pos"]),
            w=tuple(_pos_from_json(p) for p in r["w"]),
            sighting=_pos_from_json(r["sighting"]),
            belief_argmax=_pos_from_json(r["belief_argmax"]),
            belief_argmax_prob=float(r["belief_argmax_prob"]),
            distance=float(r["distance"]),
            collapsed=bool(r["collapsed"]),
        )
        for r in doc["records"]
    )
    obs = doc.get("observations") or []
    seq = (
        ObservationSequence(tuple(decode_observation(o, grid.n) for o in obs))
        if obs
        else None
    )
    snaps = doc.get("belief_snapshots")
    return EpisodeLog(
        map_hash=doc["map_hash"],
        outcome=doc["outcome"],
        records=records,
        observation_sequence=seq,
        matrix=np.array(doc["matrix"]),
        mu=np.array(doc["mu"]),
        belief_snapshots=(
            tuple(np.array(b) for b in snaps) if snaps is not None else None
        ),
    )


def save_log(log: EpisodeLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(log_to_json(log), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_log(path, grid: GridMap) -> EpisodeLog:
    with open(path, "r", encoding="utf-8") as fh:
        return log_from_json(json.load(fh), grid)
