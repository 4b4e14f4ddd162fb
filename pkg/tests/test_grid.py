"""Map parsing, movement, visibility, and observation construction."""

import numpy as np
import pytest

from hmmpursuit.grid import (
    GridMap,
    IllegalMove,
    MoveAction,
    ParseError,
    Position,
    VisibilitySpec,
    apply_move,
    legal_moves,
    load_bundled_map,
    observation_vector,
    parse_map,
    random_transition,
    serialize_map,
    uniform_transition,
    visible_set,
)

SMALL = "#####\n#P.G#\n#.#C#\n#..A#\n#####\n"


@pytest.fixture
def small():
    return parse_map(SMALL)


# ---------------------------------------------------------------- parsing


def test_parse_basic_geometry(small):
    assert (small.width, small.height) == (5, 5)
    assert small.player_start == Position(1, 1)
    assert small.ai_start == Position(3, 3)
    assert small.goals == frozenset({Position(3, 1)})
    assert small.cameras == frozenset({Position(3, 2)})
    assert small.n == 8  # 9 interior tiles minus the one inner wall


def test_state_index_is_row_major(small):
    assert small.positions[0] == Position(1, 1)
    assert small.positions == tuple(
        sorted(small.positions, key=lambda p: (p.y, p.x))
    )
    for i, pos in enumerate(small.positions):
        assert small.index_of(pos) == i
        assert small.position_of(i) == pos


def test_index_of_wall_raises(small):
    with pytest.raises(ValueError):
        small.index_of(Position(0, 0))


def test_serialize_round_trip(small):
    text = serialize_map(small)
    assert text == SMALL
    again = parse_map(text)
    assert again.map_hash == small.map_hash


def test_map_hash_changes_with_content(small):
    other = parse_map(SMALL.replace("C", "."))
    assert other.map_hash != small.map_hash


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("", 1, "empty"),
        ("###\n#P#\n##", 3, "row length"),
        ("###\n#Q#\n###", 2, "unknown character"),
        ("#####\n#P.P#\n#..G#\n#.A.#\n#####", 2, "duplicate player"),
        ("#####\n#P..#\n#..G#\n#A.A#\n#####", 4, "duplicate tracker"),
        ("####\n#.G#\n#A.#\n####", 4, "missing player"),
        ("####\n#PG#\n#..#\n####", 4, "missing tracker"),
        ("####\n#P.#\n#A.#\n####", 4, "missing goal"),
        ("#####\n#P# #\n#A#G#\n#####", 2, "unknown character"),
    ],
)
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(ParseError) as exc:
        parse_map(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_parse_rejects_trailing_whitespace():
    with pytest.raises(ParseError) as exc:
        parse_map("#####  \n#P.G#\n#.A.#\n#####")
    assert exc.value.line == 1
    assert "trailing whitespace" in str(exc.value)


def test_parse_rejects_unreachable_floor():
    # The G/A pocket on the right is sealed off from P.
    text = "#######\n#P.#G.#\n#..#.A#\n#######"
    with pytest.raises(ParseError) as exc:
        parse_map(text)
    assert "unreachable" in str(exc.value)


# --------------------------------------------------------------- movement


def test_legal_moves_center_and_corner(small):
    # (1,3) has floor north and east, walls west/south.
    got = legal_moves(small, Position(1, 3))
    assert got == frozenset(
        {MoveAction.STAY, MoveAction.NORTH, MoveAction.EAST}
    )


def test_apply_move(small):
    assert apply_move(small, Position(1, 1), MoveAction.EAST) == Position(2, 1)
    assert apply_move(small, Position(1, 1), MoveAction.STAY) == Position(1, 1)
    with pytest.raises(IllegalMove):
        apply_move(small, Position(1, 1), MoveAction.NORTH)


def test_move_char_round_trip():
    for c in "NESW.":
        assert MoveAction.from_char(c).char == c
    assert MoveAction.from_char("n") is MoveAction.NORTH
    with pytest.raises(ValueError):
        MoveAction.from_char("x")


# ------------------------------------------------------------- visibility


def test_visible_set_radius_one(small):
    w = visible_set(small, Position(1, 1), VisibilitySpec(1))
    # Chebyshev ball minus self, floors only; (2,2) is the inner wall.
    assert w == frozenset({Position(2, 1), Position(1, 2)})


def test_visible_set_excludes_observer(small):
    w = visible_set(small, Position(1, 1), VisibilitySpec(2))
    assert Position(1, 1) not in w


def test_visible_set_radius_zero(small):
    assert visible_set(small, Position(1, 1), VisibilitySpec(0)) == frozenset()


def test_visible_set_occlusion():
    # Long hall with one plug: from P, the far side of the plug is hidden
    # when occlusion is on and seen when it is off.
    grid = parse_map("#######\n#P.#.G#\n#..A..#\n#######")
    spec = VisibilitySpec(4, occlusion=True)
    w = visible_set(grid, Position(1, 1), spec)
    assert Position(4, 1) not in w
    assert Position(5, 1) not in w
    assert Position(2, 1) in w
    w_open = visible_set(grid, Position(1, 1), VisibilitySpec(4, occlusion=False))
    assert Position(4, 1) in w_open


def test_visible_set_cameras_join(small):
    w = visible_set(small, Position(1, 1), VisibilitySpec(1), cameras_active=True)
    assert Position(3, 2) in w
    assert Position(3, 2) not in visible_set(small, Position(1, 1), VisibilitySpec(1))


# ----------------------------------------------------------- observations


def test_observation_vector_negative_info(small):
    w = {Position(2, 1), Position(1, 2)}
    ov = observation_vector(small, w)
    assert ov.kind == "negative-info"
    zeros = {i for i in range(small.n) if ov.values[i] == 0.0}
    assert zeros == {small.index_of(p) for p in w}
    assert ov.values.sum() == small.n - 2


def test_observation_vector_sighting(small):
    ov = observation_vector(small, {Position(2, 1)}, sighting=Position(2, 1))
    assert ov.kind == "direct-sighting"
    assert ov.sighted_state == small.index_of(Position(2, 1))
    assert ov.values.sum() == 1.0


# -------------------------------------------------------------- matrices


def test_uniform_transition_rows(small):
    tm = uniform_transition(small)
    i = small.index_of(Position(1, 1))  # Stay, E, S legal -> 1/3 each
    row = tm.probs[i]
    assert row[i] == pytest.approx(1.0 / 3.0)
    assert row[small.index_of(Position(2, 1))] == pytest.approx(1.0 / 3.0)
    assert row[small.index_of(Position(1, 2))] == pytest.approx(1.0 / 3.0)
    assert np.count_nonzero(row) == 3
    assert np.allclose(tm.probs.sum(axis=1), 1.0)


def test_uniform_transition_support_is_adjacency(small):
    tm = uniform_transition(small)
    mask = tm.support_mask()
    for i, pos in enumerate(small.positions):
        reach = {
            small.index_of(apply_move(small, pos, act))
            for act in legal_moves(small, pos)
        }
        assert set(np.flatnonzero(mask[i])) == reach


def test_random_transition_same_support(small):
    rng = np.random.default_rng(5)
    tm = random_transition(small, rng)
    assert np.array_equal(tm.support_mask(), uniform_transition(small).support_mask())
    assert np.allclose(tm.probs.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(tm.probs[tm.support_mask()] > 0)
    # Same seed, same draw; different seed, different draw.
    again = random_transition(small, np.random.default_rng(5))
    assert np.array_equal(again.probs, tm.probs)
    other = random_transition(small, np.random.default_rng(6))
    assert not np.array_equal(other.probs, tm.probs)


# ------------------------------------------------------------ bundled map


def test_bundled_map_geometry():
    grid = load_bundled_map()
    assert isinstance(grid, GridMap)
    assert (grid.width, grid.height) == (17, 12)
    assert grid.n == 121
    assert grid.player_start == Position(8, 1)
    assert grid.ai_start == Position(8, 10)
    assert grid.goals == frozenset({Position(1, 5), Position(15, 5)})
    assert len(grid.cameras) == 4


def test_bundled_map_hash_is_stable():
    assert load_bundled_map().map_hash.startswith("693d64ec2a47")


def test_bundled_map_unknown_name():
    with pytest.raises(FileNotFoundError):
        load_bundled_map("atlantis")
