"""Scripted experiment protocols and their reports.

Three protocols: repeat one strategy for every game, switch strategies
once at a fixed game index, or alternate two strategies game by game.
Each runs under one of three tracker variants: uniform_static (never
learns), pretrained_static (learns once from a warm-up archive, then
frozen), adaptive (relearns after every game).
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .game import (
    GameRules,
    ScriptedStrategy,
    mean_estimate_distance,
    run_game,
)
from .grid import GridMap, load_bundled_map, parse_map
from .hmm import BaumWelchOptions, InitialDistribution
from .stats import DegenerateVariance, welch_t_test
from .tracker import (
    KnowledgeStore,
    blended_matrix,
    init_tracker,
    learn,
    load_store,
)

REPEAT = "repeat"
SWITCH = "switch"
ALTERNATE = "alternate"

UNIFORM_STATIC = "uniform_static"
PRETRAINED_STATIC = "pretrained_static"
ADAPTIVE = "adaptive"

_KINDS = (REPEAT, SWITCH, ALTERNATE)
_VARIANTS = (UNIFORM_STATIC, PRETRAINED_STATIC, ADAPTIVE)


class ConfigError(Exception):
    """A plan file problem, pointing at the offending line."""

    def __init__(self, message: str, path=None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}: " if path is not None and line is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class ExperimentPlan:
    kind: str
    strategies: tuple
    games: int
    tracker_variant: str
    seed: int = 0
    switch_at: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown plan kind {self.kind!r}")
        if self.tracker_variant not in _VARIANTS:
            raise ValueError(f"unknown tracker variant {self.tracker_variant!r}")
        if self.games < 1:
            raise ValueError("games must be positive")
        if self.kind == REPEAT and len(self.strategies) != 1:
            raise ValueError("repeat plan needs exactly one strategy")
        if self.kind in (SWITCH, ALTERNATE) and len(self.strategies) != 2:
            raise ValueError(f"{self.kind} plan needs exactly two strategies")
        if self.kind == SWITCH:
            if self.switch_at is None or not 1 <= self.switch_at < self.games:
                raise ValueError("switch_at must satisfy 1 <= switch_at < games")


def strategy_for_game(plan: ExperimentPlan, game_index: int) -> ScriptedStrategy:
    """Which strategy the agent plays in game_index (1-based)."""
    if not 1 <= game_index <= plan.games:
        raise ValueError(f"game index {game_index} outside 1..{plan.games}")
    if plan.kind == REPEAT:
        return plan.strategies[0]
    if plan.kind == SWITCH:
        return plan.strategies[0 if game_index <= plan.switch_at else 1]
    return plan.strategies[(game_index - 1) % 2]


@dataclass(frozen=True, eq=False)
class StatsReport:
    variant: str
    seed: int
    per_game_mean_distance: tuple
    outcomes: tuple
    comparisons: tuple = ()


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    report: StatsReport
    logs: tuple
    store: KnowledgeStore


def run_experiment(
    plan: ExperimentPlan,
    grid: GridMap,
    rules: GameRules,
    blend_lambda: float = 0.5,
    short_window: int = 3,
    learn_opts: Optional[BaumWelchOptions] = None,
    warmup_store: Optional[KnowledgeStore] = None,
    record_heatmaps: bool = False,
) -> ExperimentResult:
    """Play plan.games sequential games and report per-game mean distance.

    The adaptive variant refits the knowledge store between games.  The
    pretrained_static variant requires warmup_store (an archive of past
    episodes), learns from it once, and never updates.  plan.seed feeds
    the generator behind the adaptive variant's re-estimation restarts;
    a fixed plan is fully deterministic.
    """
    rng = np.random.default_rng(plan.seed)
    mu = InitialDistribution.point_mass(grid.n, grid.index_of(grid.player_start))
    store = KnowledgeStore(
        grid=grid, blend_lambda=blend_lambda, short_window=short_window
    )
    frozen_matrix = None
    if plan.tracker_variant == UNIFORM_STATIC:
        frozen_matrix = blended_matrix(store)  # both parents still uniform
    elif plan.tracker_variant == PRETRAINED_STATIC:
        if warmup_store is None:
            raise ValueError("pretrained_static needs a warm-up archive")
        warmed = learn(warmup_store, mu, learn_opts, rng=rng)
        frozen_matrix = blended_matrix(warmed)

    logs = []
    distances = []
    outcomes = []
    for game_index in range(1, plan.games + 1):
        matrix = (
            frozen_matrix
            if frozen_matrix is not None
            else blended_matrix(store)
        )
        tracker = init_tracker(grid, mu, matrix)
        strategy = strategy_for_game(plan, game_index)
        log, store = run_game(
            grid, rules, strategy, tracker, store, record_heatmaps=record_heatmaps
        )
        logs.append(log)
        distances.append(mean_estimate_distance(log))
        outcomes.append(log.outcome)
        if plan.tracker_variant == ADAPTIVE:
            store = learn(store, mu, learn_opts, rng=rng)

    comparisons = []
    half = plan.games // 2
    if half >= 2:
        first, second = distances[:half], distances[half:]
        try:
            res = welch_t_test(first, second)
            comparisons.append(
                {
                    "label": "first_half_vs_second_half",
                    "t": res.t_stat,
                    "df": res.df,
                    "p": res.p_value,
                }
            )
        except DegenerateVariance:
            pass  # constant runs (uniform_static) have nothing to compare

    report = StatsReport(
        variant=plan.tracker_variant,
        seed=plan.seed,
        per_game_mean_distance=tuple(distances),
        outcomes=tuple(outcomes),
        comparisons=tuple(comparisons),
    )
    return ExperimentResult(report=report, logs=tuple(logs), store=store)


def report_to_json(report: StatsReport) -> dict:
    return {
        "variant": report.variant,
        "seed": report.seed,
        "per_game_mean_distance": list(report.per_game_mean_distance),
        "outcomes": list(report.outcomes),
        "comparisons": list(report.comparisons),
    }


def report_from_json(doc: dict) -> StatsReport:
    return StatsReport(
        variant=doc["variant"],
        seed=int(doc["seed"]),
        per_game_mean_distance=tuple(float(x) for x in doc["per_game_mean_distance"]),
        outcomes=tuple(doc["outcomes"]),
        comparisons=tuple(doc["comparisons"]),
    )


def save_report(report: StatsReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_json(report), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_report(path) -> StatsReport:
    with open(path, "r", encoding="utf-8") as fh:
        return report_from_json(json.load(fh))


@dataclass(frozen=True, eq=False)
class PlanConfig:
    """Everything a simulate run needs, parsed from one key=value file."""

    grid: GridMap
    rules: GameRules
    plan: ExperimentPlan
    blend_lambda: float = 0.5
    short_window: int = 3
    learn_opts: Optional[BaumWelchOptions] = None
    warmup_store_path: Optional[str] = None

    def warmup_store(self) -> Optional[KnowledgeStore]:
        if self.warmup_store_path is None:
            return None
        return load_store(self.warmup_store_path, self.grid)


_RULE_KEYS = {
    "player_vision_radius": int,
    "ai_vision_radius": int,
    "occupy_turns_to_win": int,
    "max_turns": int,
}


def parse_plan_config(path) -> PlanConfig:
    """Parse a plain-text key=value plan file.

    Recognized keys: map, kind, games, switch_at, variant, seed,
    strategy (repeatable, "name MOVES"), blend_lambda, short_window,
    learn_iters, learn_tol, smoothing_eps, warmup_store, touch_rule and
    the numeric rule fields.  Lines starting with # and blank lines are
    skipped.  Errors cite the file and line.
    """
    path = Path(path)
    values: dict = {}
    strategies = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read plan file: {exc}", path)
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("expected key=value", path, lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not value:
            raise ConfigError(f"empty value for {key!r}", path, lineno)
        if key == "strategy":
            parts = value.split(None, 1)
            if len(parts) != 2:
                raise ConfigError(
                    "strategy wants a name and a move string", path, lineno
                )
            try:
                strategies.append(ScriptedStrategy.from_string(parts[0], parts[1]))
            except ValueError as exc:
                raise ConfigError(str(exc), path, lineno)
        elif key in values:
            raise ConfigError(f"duplicate key {key!r}", path, lineno)
        else:
            values[key] = (value, lineno)

    def take(key, cast, default=None, required=False):
        if key not in values:
            if required:
                raise ConfigError(f"missing required key {key!r}", path)
            return default
        value, lineno = values.pop(key)
        try:
            return cast(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", path, lineno)

    map_name = take("map", str, required=True)
    map_line = None  # consumed above; reparse errors cite the file only
    try:
        if map_name.endswith(".map") or "/" in map_name:
            grid = parse_map(Path(map_name).read_text(encoding="utf-8"))
        else:
            grid = load_bundled_map(map_name)
    except Exception as exc:
        raise ConfigError(f"cannot load map {map_name!r}: {exc}", path, map_line)

    rule_kwargs = {}
    for key, cast in _RULE_KEYS.items():
        got = take(key, cast)
        if got is not None:
            rule_kwargs[key] = got
    touch = take("touch_rule", str)
    if touch is not None:
        rule_kwargs["touch_rule"] = touch
    try:
        rules = GameRules(**rule_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), path)

    if not strategies:
        raise ConfigError("at least one strategy line is required", path)
    try:
        plan = ExperimentPlan(
            kind=take("kind", str, required=True),
            strategies=tuple(strategies),
            games=take("games", int, required=True),
            tracker_variant=take("variant", str, required=True),
            seed=take("seed", int, default=0),
            switch_at=take("switch_at", int),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), path)

    learn_opts = BaumWelchOptions(
        max_iters=take("learn_iters", int, default=100),
        tol=take("learn_tol", float, default=1e-6),
        smoothing_eps=take("smoothing_eps", float, default=1e-6),
    )
    config = PlanConfig(
        grid=grid,
        rules=rules,
        plan=plan,
        blend_lambda=take("blend_lambda", float, default=0.5),
        short_window=take("short_window", int, default=3),
        learn_opts=learn_opts,
        warmup_store_path=take("warmup_store", str),
    )
    if values:
        key, (_, lineno) = next(iter(values.items()))
        raise ConfigError(f"unknown key {key!r}", path, lineno)
    return config
