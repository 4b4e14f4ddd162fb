"""Command-line front end.

Subcommands: simulate (run a plan file), learn (refit a knowledge
store), stats (compare two runs), export (heatmaps and curves from
saved artifacts), serve (session service), play (terminal debug game).
All flags are long-form; exit code 0 on success, 1 on errors with a
diagnostic on stderr, 2 on usage errors.
"""

import argparse
import sys
from pathlib import Path

from .experiments import (
    ConfigError,
    load_report,
    parse_plan_config,
    run_experiment,
    save_report,
)
from .exports import export_heatmap, export_learning_curve
from .game import (
    GameRules,
    PursuitGame,
    load_log,
    mean_estimate_distance,
    replay_beliefs,
    save_log,
)
from .grid import MoveAction, load_bundled_map, parse_map, serialize_map
from .hmm import BaumWelchOptions, InitialDistribution
from .stats import StatsError, welch_t_test
from .tracker import (
    KnowledgeStore,
    blended_matrix,
    estimate_position,
    init_tracker,
    learn,
    load_store,
    save_store,
)


def _resolve_map(name: str):
    if name.endswith(".map") or "/" in name:
        return parse_map(Path(name).read_text(encoding="utf-8"))
    return load_bundled_map(name)


def _cmd_simulate(args) -> int:
    config = parse_plan_config(args.plan)
    plan = config.plan
    if args.seed is not None:
        from dataclasses import replace

        plan = replace(plan, seed=args.seed)
    result = run_experiment(
        plan,
        config.grid,
        config.rules,
        blend_lambda=config.blend_lambda,
        short_window=config.short_window,
        learn_opts=config.learn_opts,
        warmup_store=config.warmup_store(),
        record_heatmaps=args.heatmaps,
    )
    report = result.report
    for i, (dist, outcome) in enumerate(
        zip(report.per_game_mean_distance, report.outcomes), start=1
    ):
        print(f"game {i:3d}  mean_distance {dist:.4f}  {outcome}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_report(report, out / "report.json")
        export_learning_curve(report, out / "learning_curve.csv")
        for i, log in enumerate(result.logs, start=1):
            save_log(log, out / f"game_{i:03d}.json")
            if args.heatmaps and log.belief_snapshots:
                export_heatmap(
                    log.belief_snapshots[-1],
                    config.grid,
                    out / f"heatmap_{i:03d}",
                )
        print(f"wrote {args.out}")
    return 0


def _cmd_learn(args) -> int:
    grid = _resolve_map(args.map)
    store = load_store(args.store, grid)
    if not store.episodes:
        print("store has no archived episodes", file=sys.stderr)
        return 1
    mu = InitialDistribution.point_mass(grid.n, grid.index_of(grid.player_start))
    opts = BaumWelchOptions(
        max_iters=args.iters, tol=args.tol, smoothing_eps=args.smoothing
    )
    store = learn(store, mu, opts)
    out = args.out or args.store
    save_store(store, out)
    print(f"learned from {len(store.episodes)} episodes; wrote {out}")
    return 0


def _load_run_distances(path: str):
    p = Path(path)
    if p.is_dir():
        p = p / "report.json"
    return load_report(p).per_game_mean_distance


def _cmd_stats(args) -> int:
    a = _load_run_distances(args.run_a)
    b = _load_run_distances(args.run_b)
    res = welch_t_test(a, b)
    print(f"t={res.t_stat!r} df={res.df!r} p={res.p_value!r}")
    return 0


def _cmd_export(args) -> int:
    if (args.log is None) == (args.report is None):
        print("export needs exactly one of --log or --report", file=sys.stderr)
        return 1
    if args.report is not None:
        export_learning_curve(load_report(args.report), args.out)
        print(f"wrote {args.out}")
        return 0
    grid = _resolve_map(args.map)
    log = load_log(args.log, grid)
    beliefs = replay_beliefs(log, grid)
    if not beliefs:
        print("log holds no observations to replay", file=sys.stderr)
        return 1
    turn = args.turn if args.turn is not None else len(beliefs)
    if not 1 <= turn <= len(beliefs):
        print(f"--turn must lie in 1..{len(beliefs)}", file=sys.stderr)
        return 1
    csv_path, ppm_path = export_heatmap(beliefs[turn - 1], grid, args.out)
    print(f"wrote {csv_path} and {ppm_path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(
        create_app(ui_dir=args.ui),
        host=args.host,
        port=args.port,
        log_level="warning",
    )
    return 0


def _render_board(grid, agent, ai) -> str:
    rows = serialize_map(grid).splitlines()
    board = [list(r) for r in rows]
    for pos, ch in ((agent, "a"), (ai, "x")):
        board[pos.y][pos.x] = ch
    if agent == ai:
        board[agent.y][agent.x] = "*"
    return "\n".join("".join(r) for r in board)


def _cmd_play(args) -> int:
    grid = _resolve_map(args.map)
    rules = GameRules(max_turns=args.max_turns)
    mu = InitialDistribution.point_mass(grid.n, grid.index_of(grid.player_start))
    store = KnowledgeStore(grid=grid)
    tracker = init_tracker(grid, mu, blended_matrix(store))
    game = PursuitGame(grid, rules, tracker)
    script = [MoveAction.from_char(c) for c in args.moves] if args.moves else []
    index = 0
    while not game.finished:
        if index < len(script):
            action = script[index]
        elif args.moves is not None:
            action = MoveAction.STAY
        else:
            raw = input("move [n/e/s/w/.] > ").strip().lower()
            if raw in ("q", "quit"):
                game.resign()
                break
            try:
                action = MoveAction.from_char(raw.upper() or ".")
            except ValueError:
                print("unknown move; use n, e, s, w or .")
                continue
        index += 1
        record = game.step(action)
        print(_render_board(grid, game.agent_pos, game.ai_pos))
        est = estimate_position(game.tracker)
        print(
            f"turn {record.turn}  estimate {tuple(est)}  "
            f"distance {record.distance:.2f}  "
            f"{'SEEN' if record.sighting else 'hidden'}\n"
        )
    log = game.to_log()
    dist = mean_estimate_distance(log) if log.records else float("nan")
    print(f"outcome: {log.outcome}  mean distance {dist:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmmpursuit",
        description="grid pursuit games against a belief-tracking AI",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an experiment plan file")
    p.add_argument("--plan", required=True, help="key=value plan file")
    p.add_argument("--seed", type=int, default=None, help="override plan seed")
    p.add_argument("--out", default=None, help="directory for logs and reports")
    p.add_argument(
        "--heatmaps", action="store_true", help="record and export final beliefs"
    )
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("learn", help="refit matrices in a knowledge store")
    p.add_argument("--store", required=True, help="knowledge store JSON file")
    p.add_argument("--map", required=True, help="bundled map name or .map path")
    p.add_argument("--out", default=None, help="output path (default: in place)")
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--smoothing", type=float, default=1e-6)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("stats", help="compare two runs' per-game distances")
    p.add_argument("run_a", help="run directory or report.json")
    p.add_argument("run_b", help="run directory or report.json")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export", help="export heatmaps or learning curves")
    p.add_argument("--log", default=None, help="episode log JSON file")
    p.add_argument("--report", default=None, help="report JSON file (curve export)")
    p.add_argument("--map", default="island", help="map for --log replay")
    p.add_argument("--turn", type=int, default=None, help="1-based turn to export")
    p.add_argument("--out", required=True, help="output path (or path base)")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("serve", help="start the live session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None, help="directory of built client files to host")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("play", help="terminal debug game")
    p.add_argument("--map", default="island")
    p.add_argument("--moves", default=None, help="scripted agent moves, e.g. WWWSS.")
    p.add_argument("--max-turns", type=int, default=200)
    p.set_defaults(func=_cmd_play)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (OSError, ValueError, StatsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
