"""Hidden-state pursuit: a grid chase game where the AI tracks an
unseen agent with a filtered belief and learns its habits across games.

The layers, bottom up: ``hmm`` (scaled forward/backward and transition
re-estimation), ``exact`` (small-instance brute-force oracles),
``grid`` (maps and visibility), ``pathfind`` (pursuit movement),
``tracker`` (live belief and the cross-game knowledge store), ``game``
(the turn loop), ``experiments`` (protocols, statistics, reports),
``exports`` (heatmaps and curves), ``service`` (live-play sessions),
``cli`` (command line).
"""

from .grid import GridMap, MoveAction, Position, load_bundled_map, parse_map
from .hmm import (
    BaumWelchOptions,
    BeliefVector,
    InitialDistribution,
    ObservationSequence,
    ObservationVector,
    TransitionMatrix,
    backward,
    baum_welch,
    filtered_posterior,
    forward,
    smoothed_stats,
)
from .tracker import (
    KnowledgeStore,
    TrackerState,
    blended_matrix,
    estimate_position,
    ingest_observation,
    init_tracker,
    learn,
)
from .game import GameRules, PursuitGame, ScriptedStrategy, run_game

__version__ = "0.1.0"

__all__ = [
    "BaumWelchOptions",
    "BeliefVector",
    "GameRules",
    "GridMap",
    "InitialDistribution",
    "KnowledgeStore",
    "MoveAction",
    "ObservationSequence",
    "ObservationVector",
    "Position",
    "PursuitGame",
    "ScriptedStrategy",
    "TrackerState",
    "TransitionMatrix",
    "backward",
    "baum_welch",
    "blended_matrix",
    "estimate_position",
    "filtered_posterior",
    "forward",
    "ingest_observation",
    "init_tracker",
    "learn",
    "load_bundled_map",
    "parse_map",
    "run_game",
    "smoothed_stats",
    "__version__",
]
