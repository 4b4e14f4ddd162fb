"""Live-play session server.

HTTP creates sessions; one WebSocket per session then carries the whole
game as JSON messages (protocol_version 1, schema in docs/protocol.md).
The human drives the agent one move per message while the tracker
pursues; finished games are archived and learning runs on a background
executor so move handling never waits on it.
"""

import asyncio
import uuid
from dataclasses import replace
from typing import Optional

from fastapi import Body, FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .exports import heatmap_grid
from .game import (
    GameError,
    GameRules,
    PursuitGame,
    mean_estimate_distance,
)
from .grid import GridMap, IllegalMove, MoveAction, load_bundled_map, serialize_map
from .hmm import BaumWelchOptions, InitialDistribution
from .tracker import (
    KnowledgeStore,
    archive_episode,
    blended_matrix,
    init_tracker,
    learn,
)

PROTOCOL_VERSION = 1

_ACTIONS = {
    "N": MoveAction.NORTH,
    "E": MoveAction.EAST,
    "S": MoveAction.SOUTH,
    "W": MoveAction.WEST,
    "Stay": MoveAction.STAY,
    ".": MoveAction.STAY,
}


class DebugDisabled(Exception):
    pass


class Session:
    """Server-side state for one player across games."""

    def __init__(self, grid: GridMap, rules: GameRules):
        self.id = uuid.uuid4().hex
        self.grid = grid
        self.rules = rules
        self.mu = InitialDistribution.point_mass(
            grid.n, grid.index_of(grid.player_start)
        )
        self.store = KnowledgeStore(grid=grid)
        self.game: Optional[PursuitGame] = None
        self.games_played = 0
        self.debug_belief = False
        self.last_log = None
        self.learn_opts = BaumWelchOptions()
        self.learn_lock = asyncio.Lock()


def snapshot_belief(session: Session) -> list:
    """Current belief as a height x width grid (walls null)."""
    if not session.debug_belief:
        raise DebugDisabled("belief snapshots need debug_belief on")
    if session.game is None:
        raise GameError("no live game")
    return heatmap_grid(session.game.tracker.alpha, session.grid)


def _pos(p) -> list:
    return [p.x, p.y]


def state_message(session: Session) -> dict:
    game = session.game
    last = game.records[-1] if game.records else None
    msg = {
        "type": "State",
        "protocol_version": PROTOCOL_VERSION,
        "turn": game.turn,
        "agent_pos": _pos(game.agent_pos),
        "ai_pos": _pos(game.ai_pos),
        "goals": sorted(_pos(p) for p in session.grid.goals),
        "cameras": sorted(_pos(p) for p in session.grid.cameras),
        "occupy_progress": game.occupy_streak,
        "sighted": bool(last is not None and last.sighting is not None),
    }
    if session.debug_belief:
        msg["belief_grid"] = snapshot_belief(session)
    return msg


def _error(code: str, text: str) -> dict:
    return {
        "type": "Error",
        "protocol_version": PROTOCOL_VERSION,
        "code": code,
        "text": text,
    }


def _map_payload(name: str, grid: GridMap) -> dict:
    return {
        "name": name,
        "width": grid.width,
        "height": grid.height,
        "tiles": serialize_map(grid).splitlines(),
        "player_start": _pos(grid.player_start),
        "ai_start": _pos(grid.ai_start),
        "goals": sorted(_pos(p) for p in grid.goals),
        "cameras": sorted(_pos(p) for p in grid.cameras),
        "map_hash": grid.map_hash,
    }


async def _learn_and_notify(session: Session, websocket: Optional[WebSocket]):
    # Serialized per session; the swap keeps whatever episodes were
    # archived while the fit ran and replaces only the matrices.
    async with session.learn_lock:
        snapshot = session.store
        if not snapshot.episodes:
            return
        loop = asyncio.get_running_loop()
        fitted = await loop.run_in_executor(
            None, learn, snapshot, session.mu, session.learn_opts
        )
        session.store = replace(
            session.store,
            long_term=fitted.long_term,
            short_term=fitted.short_term,
        )
    if websocket is not None:
        try:
            await websocket.send_json(
                {
                    "type": "LearningDone",
                    "protocol_version": PROTOCOL_VERSION,
                    "games_played": session.games_played,
                }
            )
        except Exception:
            pass  # client went away; the store is already updated


def _finish_game(session: Session) -> dict:
    """Archive the ended game and build the GameOver message."""
    game = session.game
    log = game.to_log()
    session.last_log = log
    session.games_played += 1
    if log.observation_sequence is not None:
        session.store = archive_episode(session.store, log.observation_sequence)
    mean = (
        mean_estimate_distance(log) if log.records else None
    )
    final = state_message(session)
    session.game = None
    return {
        "type": "GameOver",
        "protocol_version": PROTOCOL_VERSION,
        "outcome": log.outcome,
        "mean_distance": mean,
        "games_played": session.games_played,
        "final": final,
    }


def handle_message(session: Session, message: dict) -> tuple:
    """Apply one client message.

    Returns (reply dict or None, learning_needed bool).  Pure session
    logic with no transport concerns, so tests can drive it directly.
    """
    if not isinstance(message, dict) or "type" not in message:
        return _error("BadMessage", "message must be an object with a type"), False
    version = message.get("protocol_version", PROTOCOL_VERSION)
    if version != PROTOCOL_VERSION:
        return (
            _error("ProtocolVersion", f"server speaks version {PROTOCOL_VERSION}"),
            False,
        )
    kind = message["type"]

    if kind == "NewGame":
        if session.game is not None and not session.game.finished:
            return _error("GameInProgress", "finish or resign the live game"), False
        tracker = init_tracker(session.grid, session.mu, blended_matrix(session.store))
        session.game = PursuitGame(session.grid, session.rules, tracker)
        return state_message(session), False

    if kind == "Move":
        if session.game is None:
            return _error("NoLiveGame", "send NewGame first"), False
        action = _ACTIONS.get(message.get("action"))
        if action is None:
            return (
                _error("BadMessage", "action must be one of N, E, S, W, Stay"),
                False,
            )
        try:
            session.game.step(action)
        except IllegalMove as exc:
            return _error("IllegalMove", str(exc)), False
        if session.game.finished:
            return _finish_game(session), True
        return state_message(session), False

    if kind == "Resign":
        if session.game is None:
            return _error("NoLiveGame", "send NewGame first"), False
        session.game.resign()
        reply = _finish_game(session)
        return reply, True

    if kind == "SetDebug":
        session.debug_belief = bool(message.get("on"))
        if session.game is not None:
            return state_message(session), False
        return None, False

    return _error("BadMessage", f"unknown message type {kind!r}"), False


def create_app(ui_dir: Optional[str] = None) -> FastAPI:
    """Build the service app.

    ``ui_dir`` optionally mounts a directory of static files (the built
    browser client) at the root, after the API routes.
    """
    app = FastAPI(title="pursuit session service")
    app.state.sessions = {}

    @app.post("/sessions", status_code=201)
    async def create_session(payload: dict = Body(default={})):
        map_name = payload.get("map", "island")
        try:
            grid = load_bundled_map(map_name)
        except (FileNotFoundError, ValueError):
            raise HTTPException(status_code=404, detail=f"unknown map {map_name!r}")
        rule_args = payload.get("rules") or {}
        try:
            rules = GameRules(**rule_args)
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        session = Session(grid, rules)
        app.state.sessions[session.id] = session
        return {
            "session_id": session.id,
            "protocol_version": PROTOCOL_VERSION,
            "map": _map_payload(map_name, grid),
        }

    @app.websocket("/ws/{session_id}")
    async def session_socket(websocket: WebSocket, session_id: str):
        await websocket.accept()
        session = app.state.sessions.get(session_id)
        if session is None:
            await websocket.send_json(
                _error("UnknownSession", f"no session {session_id!r}")
            )
            await websocket.close()
            return
        try:
            while True:
                try:
                    message = await websocket.receive_json()
                except ValueError:
                    await websocket.send_json(
                        _error("BadMessage", "frames must be JSON objects")
                    )
                    continue
                reply, learning = handle_message(session, message)
                if reply is not None:
                    await websocket.send_json(reply)
                if learning:
                    asyncio.create_task(_learn_and_notify(session, websocket))
        except WebSocketDisconnect:
            return

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
