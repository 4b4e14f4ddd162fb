"""Record a wire transcript plus headless-engine reference states.

Drives the real session service through one scripted session (two
games, both debug and plain frames, every error code) and, in parallel,
steps a direct engine game with the same moves and the same learning
schedule. After every exchange the engine-side board state and belief
argmax are recorded, so the client test can replay the transcript
through the view reducer and compare against the engine rather than
against the transcript itself.

Run from the repository root:

    python3 frontend/scripts/record_transcript.py

Rewrites frontend/tests/fixtures/replay_transcript.json.
"""

import json
import pathlib

from fastapi.testclient import TestClient

from hmmpursuit.game import GameRules, PursuitGame
from hmmpursuit.grid import MoveAction, load_bundled_map
from hmmpursuit.hmm import BaumWelchOptions, InitialDistribution
from hmmpursuit.service import create_app
from hmmpursuit.tracker import (
    KnowledgeStore,
    archive_episode,
    blended_matrix,
    estimate_position,
    init_tracker,
    learn,
)

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"

ACTIONS = {
    "N": MoveAction.NORTH,
    "E": MoveAction.EAST,
    "S": MoveAction.SOUTH,
    "W": MoveAction.WEST,
    "Stay": MoveAction.STAY,
}

# Script: error before any game, a full win with the belief overlay on,
# then a second game against the refit tracker exercising IllegalMove,
# debug toggling, every remaining error code, and a resignation.
PLAN = (
    [("send", {"type": "Move", "action": "W"}, 1)]
    + [("send", {"type": "SetDebug", "on": True}, 0)]
    + [("send", {"type": "NewGame"}, 1)]
    + [("send", {"type": "Move", "action": "W"}, 1)] * 7
    + [("send", {"type": "Move", "action": "S"}, 1)] * 4
    + [("send", {"type": "Move", "action": "Stay"}, 1)]
    + [("send", {"type": "Move", "action": "Stay"}, 2)]  # GameOver + LearningDone
    + [("send", {"type": "NewGame"}, 1)]
    + [("send", {"type": "Move", "action": "N"}, 1)]  # wall above the start
    + [("send", {"type": "SetDebug", "on": False}, 1)]
    + [("send", {"type": "Move", "action": "E"}, 1)] * 3
    + [("send", {"type": "SetDebug", "on": True}, 1)]
    + [("send", {"type": "Move", "action": "Q"}, 1)]  # BadMessage
    + [("send", {"type": "Move", "action": "E", "protocol_version": 99}, 1)]
    + [("send", {"type": "Dance"}, 1)]  # BadMessage, unknown type
    + [("send", {"type": "NewGame"}, 1)]  # GameInProgress
    + [("send", {"type": "Move", "action": "S"}, 1)] * 2
    + [("send", {"type": "Resign"}, 2)]  # GameOver + LearningDone
)


class EngineMirror:
    """The same moves played straight against the engine."""

    def __init__(self):
        self.grid = load_bundled_map()
        self.rules = GameRules()
        self.mu = InitialDistribution.point_mass(
            self.grid.n, self.grid.index_of(self.grid.player_start)
        )
        self.store = KnowledgeStore(grid=self.grid)
        self.game = None
        self.live = False

    def apply(self, message: dict):
        if message.get("protocol_version", 1) != 1:
            return
        kind = message["type"]
        if kind == "NewGame" and not self.live:
            tracker = init_tracker(self.grid, self.mu, blended_matrix(self.store))
            self.game = PursuitGame(self.grid, self.rules, tracker)
            self.live = True
        elif kind == "Move" and self.live:
            action = ACTIONS.get(message.get("action"))
            if action is None:
                return
            try:
                self.game.step(action)
            except Exception:
                return  # illegal move, engine state unchanged
            if self.game.finished:
                self._finish()
        elif kind == "Resign" and self.live:
            self.game.resign()
            self._finish()

    def _finish(self):
        log = self.game.to_log()
        if log.observation_sequence is not None:
            self.store = archive_episode(self.store, log.observation_sequence)
        # mirror the service's background refit, same default options
        self.store = learn(self.store, self.mu, BaumWelchOptions())
        self.live = False

    def snapshot(self):
        if self.game is None:
            return None
        game = self.game
        last = game.records[-1] if game.records else None
        guess = estimate_position(game.tracker)
        return {
            "turn": game.turn,
            "agent": [game.agent_pos.x, game.agent_pos.y],
            "ai": [game.ai_pos.x, game.ai_pos.y],
            "occupy": game.occupy_streak,
            "sighted": bool(last is not None and last.sighting is not None),
            "argmax": [guess.x, guess.y],
            "live": self.live,
        }


def main():
    app = create_app()
    mirror = EngineMirror()
    entries = []
    with TestClient(app) as client:
        made = client.post("/sessions", json={})
        assert made.status_code == 201, made.text
        session = made.json()
        with client.websocket_connect(f"/ws/{session['session_id']}") as ws:
            for _, message, expected_replies in PLAN:
                ws.send_json(message)
                received = [ws.receive_json() for _ in range(expected_replies)]
                mirror.apply(message)
                expect = mirror.snapshot()
                if expect is not None:
                    _check(received, expect)
                entries.append(
                    {"send": message, "recv": received, "expect": expect}
                )

    total = sum(len(e["recv"]) for e in entries)
    fixture = {
        "map": session["map"],
        "protocol_version": session["protocol_version"],
        "entries": entries,
        "total_messages": total,
    }
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / "replay_transcript.json"
    path.write_text(json.dumps(fixture, indent=1))
    print(f"wrote {path} with {len(entries)} exchanges, {total} server messages")


def _check(received, expect):
    """Generation-time sanity: the wire must already agree with the
    engine, otherwise the fixture would bake in a bug."""
    states = [m for m in received if m.get("type") in ("State", "GameOver")]
    if not states:
        return
    last = states[-1]
    board = last["final"] if last["type"] == "GameOver" else last
    assert board["turn"] == expect["turn"], (board, expect)
    assert board["agent_pos"] == expect["agent"], (board, expect)
    assert board["ai_pos"] == expect["ai"], (board, expect)
    assert board["occupy_progress"] == expect["occupy"]
    assert board["sighted"] == expect["sighted"]


if __name__ == "__main__":
    main()
