"""Shortest-path machinery for the pursuit AI.

The grid is unweighted (every step costs 1) so Dijkstra and BFS agree
on distances; Dijkstra is used because the tie-breaking it induces via
the heap is the documented move-selection order.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .grid import MOVE_ORDER, GridMap, MoveAction, Position


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Distances from a source tile to every floor tile.

    Attributes
    ----------
    source : Position
    dist : np.ndarray
        Float array of length ``grid.n``; ``np.inf`` marks tiles not
        reachable from the source.
    pred : np.ndarray
        Int array of length ``grid.n``; ``pred[i]`` is the state index
        of the tile preceding ``i`` on a shortest path from the source,
        or -1 for the source itself and unreachable tiles.
    """

    source: Position
    dist: np.ndarray
    pred: np.ndarray


def _neighbors(grid: GridMap, pos: Position):
    # Fixed scan order: N, E, S, W.  Stay is not a pathfinding step.
    for action in MOVE_ORDER:
        dx, dy = action.delta
        nxt = Position(pos.x + dx, pos.y + dy)
        if grid.is_floor(nxt):
            yield nxt


def dijkstra(grid: GridMap, source: Position) -> DistanceField:
    """Single-source shortest paths over the floor graph.

    Neighbors are relaxed in N, E, S, W order, so among equally short
    paths the predecessor chain prefers the earliest direction in that
    order at each branch.
    """
    if not grid.is_floor(source):
        raise ValueError(f"source {source} is not a floor tile")
    n = grid.n
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    src = grid.index_of(source)
    dist[src] = 0.0
    heap = [(0.0, src)]
    done = np.zeros(n, dtype=bool)
    while heap:
        d, idx = heapq.heappop(heap)
        if done[idx]:
            continue
        done[idx] = True
        for nxt in _neighbors(grid, grid.position_of(idx)):
            j = grid.index_of(nxt)
            nd = d + 1.0
            if nd < dist[j]:
                dist[j] = nd
                pred[j] = idx
                heapq.heappush(heap, (nd, j))
    return DistanceField(source=source, dist=dist, pred=pred)


def next_move(grid: GridMap, start: Position, target: Position) -> MoveAction:
    """First step of a shortest path from start toward target.

    Returns Stay when start equals target or when the target cannot be
    reached.  Ties between equally short first steps resolve in
    N, E, S, W order: the move chosen is the first one whose
    destination strictly decreases the distance-to-target.
    """
    if start == target:
        return MoveAction.STAY
    field = dijkstra(grid, target)
    here = field.dist[grid.index_of(start)]
    if not np.isfinite(here):
        return MoveAction.STAY
    for action in MOVE_ORDER:
        dx, dy = action.delta
        nxt = Position(start.x + dx, start.y + dy)
        if grid.is_floor(nxt) and field.dist[grid.index_of(nxt)] == here - 1.0:
            return action
    raise AssertionError("finite distance but no descending neighbor")
