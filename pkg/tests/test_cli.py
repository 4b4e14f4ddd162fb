"""Command-line behaviors, driven through main() with parsed argv."""

import json

import numpy as np
import pytest

from hmmpursuit.cli import main
from hmmpursuit.experiments import StatsReport, load_report, save_report
from hmmpursuit.game import GameRules, ScriptedStrategy, run_game, save_log
from hmmpursuit.grid import load_bundled_map, uniform_transition
from hmmpursuit.hmm import InitialDistribution
from hmmpursuit.stats import welch_t_test
from hmmpursuit.tracker import KnowledgeStore, init_tracker, load_store, save_store

HALL = "######\n#P.AG#\n######\n"

PLAN = """\
map = island
kind = repeat
games = 2
variant = uniform_static
strategy = left WWWWWWWSSSS
"""


def _write_plan(tmp_path, text=PLAN):
    path = tmp_path / "run.plan"
    path.write_text(text)
    return path


# --------------------------------------------------------------- simulate


def test_simulate_writes_run_directory(tmp_path, capsys):
    plan = _write_plan(tmp_path)
    out = tmp_path / "run"
    assert main(["simulate", "--plan", str(plan), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "game   1" in stdout and "agent_won" in stdout
    assert (out / "report.json").is_file()
    assert (out / "learning_curve.csv").is_file()
    assert (out / "game_001.json").is_file()
    assert (out / "game_002.json").is_file()
    assert not (out / "heatmap_001.csv").exists()
    report = load_report(out / "report.json")
    assert report.variant == "uniform_static"
    assert len(report.per_game_mean_distance) == 2
    curve = (out / "learning_curve.csv").read_text().splitlines()
    assert curve[0] == "game_index,variant,mean_distance"
    assert len(curve) == 3


def test_simulate_heatmaps_flag(tmp_path):
    plan = _write_plan(tmp_path)
    out = tmp_path / "run"
    assert (
        main(["simulate", "--plan", str(plan), "--out", str(out), "--heatmaps"]) == 0
    )
    assert (out / "heatmap_001.csv").is_file()
    assert (out / "heatmap_002.ppm").is_file()


def test_simulate_seed_override(tmp_path):
    plan = _write_plan(tmp_path)
    out = tmp_path / "run"
    assert main(["simulate", "--plan", str(plan), "--seed", "42", "--out", str(out)]) == 0
    assert load_report(out / "report.json").seed == 42


def test_simulate_is_byte_deterministic(tmp_path):
    plan = _write_plan(tmp_path)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["simulate", "--plan", str(plan), "--out", str(out_a)]) == 0
    assert main(["simulate", "--plan", str(plan), "--out", str(out_b)]) == 0
    for name in ("report.json", "learning_curve.csv", "game_001.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_simulate_bad_plan_exits_one(tmp_path, capsys):
    plan = tmp_path / "broken.plan"
    plan.write_text("map island\n")
    assert main(["simulate", "--plan", str(plan)]) == 1
    err = capsys.readouterr().err
    assert f"{plan}:1:" in err


def test_simulate_missing_plan_exits_one(tmp_path, capsys):
    assert main(["simulate", "--plan", str(tmp_path / "ghost.plan")]) == 1
    assert "cannot read" in capsys.readouterr().err


# ------------------------------------------------------------------ learn


def _store_with_episode(tmp_path):
    grid = load_bundled_map()
    mu = InitialDistribution.point_mass(grid.n, grid.index_of(grid.player_start))
    tracker = init_tracker(grid, mu, uniform_transition(grid))
    _, store = run_game(
        grid,
        GameRules(),
        ScriptedStrategy.from_string("left", "WWWWWWWSSSS"),
        tracker,
        KnowledgeStore(grid=grid),
    )
    path = tmp_path / "store.json"
    save_store(store, path)
    return grid, path


def test_learn_refits_store(tmp_path, capsys):
    grid, store_path = _store_with_episode(tmp_path)
    out = tmp_path / "fitted.json"
    code = main(
        [
            "learn",
            "--store",
            str(store_path),
            "--map",
            "island",
            "--out",
            str(out),
            "--iters",
            "5",
        ]
    )
    assert code == 0
    assert "1 episodes" in capsys.readouterr().out
    fitted = load_store(out, grid)
    assert not np.array_equal(fitted.long_term.probs, uniform_transition(grid).probs)
    # The source store file is untouched when --out is given.
    original = load_store(store_path, grid)
    assert np.array_equal(original.long_term.probs, uniform_transition(grid).probs)


def test_learn_in_place_default(tmp_path):
    grid, store_path = _store_with_episode(tmp_path)
    assert main(["learn", "--store", str(store_path), "--map", "island", "--iters", "3"]) == 0
    fitted = load_store(store_path, grid)
    assert not np.array_equal(fitted.long_term.probs, uniform_transition(grid).probs)


def test_learn_empty_store_exits_one(tmp_path, capsys):
    grid = load_bundled_map()
    path = tmp_path / "empty.json"
    save_store(KnowledgeStore(grid=grid), path)
    assert main(["learn", "--store", str(path), "--map", "island"]) == 1
    assert "no archived episodes" in capsys.readouterr().err


# ------------------------------------------------------------------ stats


def _report_file(tmp_path, name, distances):
    report = StatsReport(
        variant="adaptive",
        seed=0,
        per_game_mean_distance=tuple(distances),
        outcomes=("agent_won",) * len(distances),
    )
    path = tmp_path / name
    save_report(report, path)
    return path


def test_stats_compares_reports(tmp_path, capsys):
    a = _report_file(tmp_path, "a.json", (1.0, 2.0, 3.0, 4.0))
    b = _report_file(tmp_path, "b.json", (2.0, 3.0, 4.0, 5.0))
    assert main(["stats", str(a), str(b)]) == 0
    out = capsys.readouterr().out
    want = welch_t_test((1.0, 2.0, 3.0, 4.0), (2.0, 3.0, 4.0, 5.0))
    assert out.strip() == f"t={want.t_stat!r} df={want.df!r} p={want.p_value!r}"


def test_stats_accepts_run_directories(tmp_path, capsys):
    run_a = tmp_path / "runA"
    run_b = tmp_path / "runB"
    run_a.mkdir()
    run_b.mkdir()
    _report_file(run_a, "report.json", (1.0, 2.0))
    _report_file(run_b, "report.json", (5.0, 7.0))
    assert main(["stats", str(run_a), str(run_b)]) == 0
    assert capsys.readouterr().out.startswith("t=")


def test_stats_degenerate_exits_one(tmp_path, capsys):
    a = _report_file(tmp_path, "a.json", (2.0, 2.0))
    b = _report_file(tmp_path, "b.json", (3.0, 3.0))
    assert main(["stats", str(a), str(b)]) == 1
    assert "constant" in capsys.readouterr().err


# ----------------------------------------------------------------- export


def test_export_curve_from_report(tmp_path):
    report = _report_file(tmp_path, "report.json", (2.0, 1.0))
    out = tmp_path / "curve.csv"
    assert main(["export", "--report", str(report), "--out", str(out)]) == 0
    assert out.read_text().startswith("game_index,variant,mean_distance\n")


def test_export_heatmap_from_log(tmp_path):
    grid = load_bundled_map()
    mu = InitialDistribution.point_mass(grid.n, grid.index_of(grid.player_start))
    tracker = init_tracker(grid, mu, uniform_transition(grid))
    log, _ = run_game(
        grid,
        GameRules(),
        ScriptedStrategy.from_string("left", "WWWWWWWSSSS"),
        tracker,
        KnowledgeStore(grid=grid),
    )
    log_path = tmp_path / "game.json"
    save_log(log, log_path)
    base = tmp_path / "snap"
    code = main(
        ["export", "--log", str(log_path), "--map", "island", "--out", str(base)]
    )
    assert code == 0
    assert (tmp_path / "snap.csv").is_file()
    assert (tmp_path / "snap.ppm").is_file()
    # Specific turn selection is bounds-checked.
    assert (
        main(
            [
                "export",
                "--log",
                str(log_path),
                "--map",
                "island",
                "--turn",
                "999",
                "--out",
                str(base),
            ]
        )
        == 1
    )


def test_export_needs_exactly_one_source(tmp_path, capsys):
    assert main(["export", "--out", str(tmp_path / "x")]) == 1
    assert "exactly one" in capsys.readouterr().err
    report = _report_file(tmp_path, "r.json", (1.0,))
    assert (
        main(
            [
                "export",
                "--report",
                str(report),
                "--log",
                "whatever.json",
                "--out",
                str(tmp_path / "x"),
            ]
        )
        == 1
    )


# ------------------------------------------------------------------- play


def test_play_scripted(tmp_path, capsys):
    map_path = tmp_path / "hall.map"
    map_path.write_text(HALL)
    assert main(["play", "--map", str(map_path), "--moves", "."]) == 0
    out = capsys.readouterr().out
    assert "outcome: ai_won" in out
    assert "a" in out.splitlines()[1]  # agent drawn on the board


def test_play_respects_max_turns(tmp_path, capsys):
    assert main(["play", "--map", "island", "--moves", ".", "--max-turns", "2"]) == 0
    out = capsys.readouterr().out
    assert "outcome:" in out


# ------------------------------------------------------------------ parser


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["conquer"])
    assert exc.value.code == 2


def test_missing_required_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2


def test_game_log_json_loads_back(tmp_path):
    plan = _write_plan(tmp_path)
    out = tmp_path / "run"
    main(["simulate", "--plan", str(plan), "--out", str(out)])
    doc = json.loads((out / "game_001.json").read_text())
    assert doc["outcome"] == "agent_won"
    assert doc["records"][0]["turn"] == 1
