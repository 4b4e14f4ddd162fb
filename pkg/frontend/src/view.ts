// Client-side game view: a pure fold over server messages. Every field
// the UI draws comes from here, and here only from the last message,
// so replaying a recorded transcript reproduces the display state
// exactly.

import type {
  BeliefGrid,
  ErrorMsg,
  Outcome,
  Pos,
  ServerMsg,
  StateMsg,
} from "./protocol.js";

export interface BoardView {
  turn: number;
  agentPos: Pos;
  aiPos: Pos;
  goals: Pos[];
  cameras: Pos[];
  occupyProgress: number;
  sighted: boolean;
  belief: BeliefGrid | null;
}

export interface GameRecord {
  gameIndex: number; // 1-based, from games_played
  meanDistance: number | null;
  outcome: Outcome;
}

export interface ClientGameView {
  board: BoardView | null;
  live: boolean; // a game is in progress
  history: GameRecord[]; // one entry per finished game, in order
  gamesPlayed: number;
  learning: boolean; // server refit still running
  lastError: ErrorMsg | null;
}

export function emptyView(): ClientGameView {
  return {
    board: null,
    live: false,
    history: [],
    gamesPlayed: 0,
    learning: false,
    lastError: null,
  };
}

function boardFrom(msg: StateMsg): BoardView {
  return {
    turn: msg.turn,
    agentPos: msg.agent_pos,
    aiPos: msg.ai_pos,
    goals: msg.goals,
    cameras: msg.cameras,
    occupyProgress: msg.occupy_progress,
    sighted: msg.sighted,
    belief: msg.belief_grid ?? null,
  };
}

export function applyServer(
  view: ClientGameView,
  msg: ServerMsg,
): ClientGameView {
  switch (msg.type) {
    case "State":
      return { ...view, board: boardFrom(msg), live: true, lastError: null };
    case "GameOver":
      return {
        ...view,
        board: boardFrom(msg.final),
        live: false,
        gamesPlayed: msg.games_played,
        learning: true,
        lastError: null,
        history: [
          ...view.history,
          {
            gameIndex: msg.games_played,
            meanDistance: msg.mean_distance,
            outcome: msg.outcome,
          },
        ],
      };
    case "LearningDone":
      return { ...view, gamesPlayed: msg.games_played, learning: false };
    case "Error":
      // the offending message consumed no turn; the board stands
      return { ...view, lastError: msg };
  }
}
