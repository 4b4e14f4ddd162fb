# What does the tracker actually learn?
# ======================================
#
# The tracker's whole model of the opponent is one row-stochastic matrix
# over floor tiles: row i says where an agent standing on tile i goes
# next. This script archives a few games of the same scripted route,
# re-estimates the matrix, and prints selected rows before and after, so
# you can see probability mass migrating onto the route.
#
# It then plays two games of the opposite route and shows how the
# recency-weighted store (a blend of an all-games model and a
# last-few-games model) shifts while the long-term memory still
# remembers the old habit.
#
# HOW TO RUN:
#   python3 demos/learned_matrix_anatomy.py

import numpy as np

from hmmpursuit.game import GameRules, ScriptedStrategy, run_game
from hmmpursuit.grid import Position, load_bundled_map, uniform_transition
from hmmpursuit.hmm import InitialDistribution
from hmmpursuit.tracker import KnowledgeStore, blended_matrix, init_tracker, learn

grid = load_bundled_map()
rules = GameRules()
mu = InitialDistribution.point_mass(grid.n, grid.index_of(grid.player_start))
LEFT = ScriptedStrategy.from_string("left", "WWWWWWWSSSS")
RIGHT = ScriptedStrategy.from_string("right", "EEEEEEESSSS")


def describe_row(matrix, pos):
    """Pretty-print one transition row as move probabilities."""
    row = matrix.probs[grid.index_of(pos)]
    parts = []
    # drop sub-0.1% entries (regularization dust) from the listing
    for j in np.flatnonzero(row > 1e-3):
        to = grid.position_of(int(j))
        dx, dy = to.x - pos.x, to.y - pos.y
        name = {(0, -1): "N", (1, 0): "E", (0, 1): "S", (-1, 0): "W", (0, 0): "stay"}[
            (dx, dy)
        ]
        parts.append(f"{name} {row[j]:.3f}")
    return f"  from {pos}: " + ", ".join(parts)


# Tiles worth watching: the start, a mid-lane tile on the westward route,
# and the camera tile the route crosses.
WATCH = [grid.player_start, Position(6, 1), Position(4, 1)]

store = KnowledgeStore(grid)
print("before any games (uniform over legal moves):")
for pos in WATCH:
    print(describe_row(store.long_term, pos))

# --- Archive five identical games and re-estimate ------------------------

for _ in range(5):
    tracker = init_tracker(grid, mu, blended_matrix(store))
    _, store = run_game(grid, rules, LEFT, tracker, store)
store = learn(store, mu)

print()
print("after five games of the westward route:")
for pos in WATCH:
    print(describe_row(store.long_term, pos))
print("mass on the route tiles has moved onto W; off-route rows are")
print("untouched because no evidence ever places the agent there:")
print(describe_row(store.long_term, Position(12, 10)))

# --- Now the agent changes habit -----------------------------------------

for _ in range(2):
    tracker = init_tracker(grid, mu, blended_matrix(store))
    _, store = run_game(grid, rules, RIGHT, tracker, store)
store = learn(store, mu)

print()
print("after two more games of the eastward route:")
print("long-term memory (all seven games) still leans W from the start,")
print("short-term memory (last three games) has flipped to E:")
print("  long ", describe_row(store.long_term, grid.player_start).strip())
print("  short", describe_row(store.short_term, grid.player_start).strip())
print("the tracker plays their blend:")
print("  blend", describe_row(blended_matrix(store), grid.player_start).strip())
