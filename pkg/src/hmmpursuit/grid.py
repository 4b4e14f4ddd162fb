"""Grid maps, movement rules, visibility, and observation construction.

A map is an ASCII document: ``#`` wall, ``.`` floor, ``P`` player start,
``A`` tracker start, ``G`` goal, ``C`` camera tile. All rows have equal
length, trailing whitespace is forbidden, and the floor must be
4-connected from the player start. Floor tiles are numbered row-major
into a dense state space, which is what the inference code works over.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import NamedTuple, Optional

import numpy as np

from .hmm import (
    DIRECT_SIGHTING,
    NEGATIVE_INFO,
    ObservationVector,
    StateSpace,
    TransitionMatrix,
)

__all__ = [
    "WALL",
    "FLOOR",
    "PLAYER_START",
    "AI_START",
    "GOAL",
    "CAMERA",
    "Position",
    "MoveAction",
    "MOVE_ORDER",
    "VisibilitySpec",
    "ParseError",
    "IllegalMove",
    "GridMap",
    "parse_map",
    "serialize_map",
    "legal_moves",
    "apply_move",
    "visible_set",
    "observation_vector",
    "uniform_transition",
    "random_transition",
    "load_bundled_map",
]

WALL = "#"
FLOOR = "."
PLAYER_START = "P"
AI_START = "A"
GOAL = "G"
CAMERA = "C"
_ALPHABET = {WALL, FLOOR, PLAYER_START, AI_START, GOAL, CAMERA}


class Position(NamedTuple):
    """Tile coordinates: x grows rightward, y grows downward, 0-based."""

    x: int
    y: int


class MoveAction(Enum):
    NORTH = (0, -1)
    EAST = (1, 0)
    SOUTH = (0, 1)
    WEST = (-1, 0)
    STAY = (0, 0)

    @property
    def delta(self) -> tuple:
        return self.value

    @classmethod
    def from_char(cls, c: str) -> "MoveAction":
        try:
            return _MOVE_CHARS[c.upper()]
        except KeyError:
            raise ValueError(f"unknown move character {c!r}") from None

    @property
    def char(self) -> str:
        return _CHAR_OF_MOVE[self]


#: Cardinal directions in the fixed exploration order used everywhere a
#: deterministic neighbor order matters (pathfinding, tie-breaking).
MOVE_ORDER = (MoveAction.NORTH, MoveAction.EAST, MoveAction.SOUTH, MoveAction.WEST)

_MOVE_CHARS = {
    "N": MoveAction.NORTH,
    "E": MoveAction.EAST,
    "S": MoveAction.SOUTH,
    "W": MoveAction.WEST,
    ".": MoveAction.STAY,
}
_CHAR_OF_MOVE = {v: k for k, v in _MOVE_CHARS.items()}


@dataclass(frozen=True)
class VisibilitySpec:
    """Square (Chebyshev) vision radius; occlusion makes walls block
    sight along the straight tile line."""

    radius: int
    occlusion: bool = False

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")


class ParseError(ValueError):
    """Map text rejected; carries 1-based line and column."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class IllegalMove(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GridMap:
    """Immutable parsed map with a dense floor-tile state index."""

    width: int
    height: int
    walls: np.ndarray  # (height, width) bool
    goals: frozenset
    cameras: frozenset
    player_start: Position
    ai_start: Position
    positions: tuple  # state index -> Position, row-major
    index: dict  # Position -> state index

    @property
    def n(self) -> int:
        return len(self.positions)

    def state_space(self) -> StateSpace:
        return StateSpace(self.n, labels=self.positions)

    def in_bounds(self, pos: Position) -> bool:
        return 0 <= pos.x < self.width and 0 <= pos.y < self.height

    def is_floor(self, pos: Position) -> bool:
        return self.in_bounds(pos) and not self.walls[pos.y, pos.x]

    def index_of(self, pos: Position) -> int:
        try:
            return self.index[pos]
        except KeyError:
            raise ValueError(f"{pos} is not a floor tile") from None

    def position_of(self, state: int) -> Position:
        return self.positions[state]

    @property
    def map_hash(self) -> str:
        """SHA-256 of the canonical serialized text; guards stored
        knowledge against being replayed onto a different map."""
        return hashlib.sha256(serialize_map(self).encode("ascii")).hexdigest()


def parse_map(text: str) -> GridMap:
    """Parse and validate an ASCII map document."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if not lines:
        raise ParseError("empty map", 1)
    width = len(lines[0])
    player = None
    ai = None
    goals = set()
    cameras = set()
    rows = []
    for y, line in enumerate(lines):
        lineno = y + 1
        if line != line.rstrip():
            raise ParseError("trailing whitespace", lineno, len(line.rstrip()) + 1)
        if len(line) != width:
            raise ParseError(
                f"row length {len(line)} differs from first row ({width})", lineno
            )
        for x, c in enumerate(line):
            if c not in _ALPHABET:
                raise ParseError(f"unknown character {c!r}", lineno, x + 1)
            pos = Position(x, y)
            if c == PLAYER_START:
                if player is not None:
                    raise ParseError("duplicate player start", lineno, x + 1)
                player = pos
            elif c == AI_START:
                if ai is not None:
                    raise ParseError("duplicate tracker start", lineno, x + 1)
                ai = pos
            elif c == GOAL:
                goals.add(pos)
            elif c == CAMERA:
                cameras.add(pos)
        rows.append(line)
    if width == 0:
        raise ParseError("empty rows", 1)
    if player is None:
        raise ParseError("missing player start 'P'", len(lines))
    if ai is None:
        raise ParseError("missing tracker start 'A'", len(lines))
    if not goals:
        raise ParseError("missing goal 'G'", len(lines))

    height = len(rows)
    walls = np.zeros((height, width), dtype=bool)
    for y, line in enumerate(rows):
        for x, c in enumerate(line):
            walls[y, x] = c == WALL
    walls.setflags(write=False)

    floor = [
        Position(x, y) for y in range(height) for x in range(width) if not walls[y, x]
    ]
    index = {pos: i for i, pos in enumerate(floor)}

    # Reject maps with arenas unreachable from the player start.
    seen = {player}
    stack = [player]
    while stack:
        p = stack.pop()
        for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
            q = Position(p.x + dx, p.y + dy)
            if q in index and q not in seen:
                seen.add(q)
                stack.append(q)
    if len(seen) != len(floor):
        orphan = next(p for p in floor if p not in seen)
        raise ParseError("floor tile unreachable from player start", orphan.y + 1, orphan.x + 1)

    return GridMap(
        width=width,
        height=height,
        walls=walls,
        goals=frozenset(goals),
        cameras=frozenset(cameras),
        player_start=player,
        ai_start=ai,
        positions=tuple(floor),
        index=index,
    )


def serialize_map(grid: GridMap) -> str:
    """Inverse of :func:`parse_map`; ends with a newline."""
    out = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            pos = Position(x, y)
            if grid.walls[y, x]:
                row.append(WALL)
            elif pos == grid.player_start:
                row.append(PLAYER_START)
            elif pos == grid.ai_start:
                row.append(AI_START)
            elif pos in grid.goals:
                row.append(GOAL)
            elif pos in grid.cameras:
                row.append(CAMERA)
            else:
                row.append(FLOOR)
        out.append("".join(row))
    return "\n".join(out) + "\n"


def legal_moves(grid: GridMap, pos: Position) -> frozenset:
    """Stay plus every cardinal step onto in-bounds floor."""
    if not grid.is_floor(pos):
        raise IllegalMove(f"{pos} is not a floor tile")
    moves = {MoveAction.STAY}
    for act in MOVE_ORDER:
        dx, dy = act.delta
        if grid.is_floor(Position(pos.x + dx, pos.y + dy)):
            moves.add(act)
    return frozenset(moves)


def apply_move(grid: GridMap, pos: Position, act: MoveAction) -> Position:
    if act not in legal_moves(grid, pos):
        raise IllegalMove(f"{act.name} from {pos} enters a wall or leaves the grid")
    dx, dy = act.delta
    return Position(pos.x + dx, pos.y + dy)


def _line_of_sight(grid: GridMap, a: Position, b: Position) -> bool:
    """Walls strictly between the two tile centers block sight
    (Bresenham line; endpoints never block)."""
    x0, y0, x1, y1 = a.x, a.y, b.x, b.y
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        if (x, y) != (x0, y0) and (x, y) != (x1, y1):
            if grid.walls[y, x]:
                return False
        if (x, y) == (x1, y1):
            return True
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def visible_set(
    grid: GridMap,
    observer: Position,
    spec: VisibilitySpec,
    cameras_active: bool = False,
) -> frozenset:
    """Floor tiles the observer sees this turn.

    The square of Chebyshev radius ``spec.radius`` around the observer,
    excluding the observer's own tile, optionally filtered by wall
    occlusion, plus every camera tile when cameras are active.
    """
    if not grid.is_floor(observer):
        raise IllegalMove(f"observer {observer} is not a floor tile")
    seen = set()
    r = spec.radius
    for y in range(observer.y - r, observer.y + r + 1):
        for x in range(observer.x - r, observer.x + r + 1):
            pos = Position(x, y)
            if pos == observer or not grid.is_floor(pos):
                continue
            if spec.occlusion and not _line_of_sight(grid, observer, pos):
                continue
            seen.add(pos)
    if cameras_active:
        seen |= grid.cameras
    return frozenset(seen)


def observation_vector(
    grid: GridMap, w, sighting: Optional[Position] = None
) -> ObservationVector:
    """Turn a visible-and-empty set (or a direct sighting) into per-state
    observation likelihoods.

    With no sighting, states in ``w`` get 0 and every other state 1: the
    agent was looked for there and not found. A sighting pins the vector
    one-hot to the sighted tile.
    """
    if sighting is not None:
        values = np.zeros(grid.n)
        values[grid.index_of(sighting)] = 1.0
        return ObservationVector(values, kind=DIRECT_SIGHTING)
    values = np.ones(grid.n)
    for pos in w:
        values[grid.index_of(pos)] = 0.0
    return ObservationVector(values, kind=NEGATIVE_INFO)


def uniform_transition(grid: GridMap) -> TransitionMatrix:
    """Uniform movement over each tile's legal moves (Stay included).

    The support mask is exactly the legal-move adjacency relation, which
    is what learned matrices inherit as their structural support.
    """
    n = grid.n
    probs = np.zeros((n, n))
    support = np.zeros((n, n), dtype=bool)
    for i, pos in enumerate(grid.positions):
        targets = [apply_move(grid, pos, act) for act in legal_moves(grid, pos)]
        share = 1.0 / len(targets)
        for t in targets:
            j = grid.index_of(t)
            probs[i, j] = share
            support[i, j] = True
    return TransitionMatrix(probs, support=support)


def random_transition(grid: GridMap, rng: np.random.Generator) -> TransitionMatrix:
    """Random movement matrix on the legal-move support.

    Each row is a flat-Dirichlet draw over that tile's legal moves, so
    the result is row-stochastic with the same structural support as
    uniform_transition.  Used for randomized re-estimation restarts.
    """
    support = uniform_transition(grid).support_mask()
    probs = np.zeros_like(support, dtype=float)
    for i in range(grid.n):
        cols = np.flatnonzero(support[i])
        draw = rng.gamma(1.0, 1.0, size=cols.size)
        probs[i, cols] = draw / draw.sum()
    return TransitionMatrix(probs, support=support)


def load_bundled_map(name: str = "island") -> GridMap:
    """Load a map shipped with the package (``island`` by default)."""
    text = (resources.files(__package__) / "maps" / f"{name}.map").read_text()
    return parse_map(text)
