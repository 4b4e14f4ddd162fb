// Wire protocol types, version 1. These mirror docs/protocol.md; the
// client computes no game logic of its own, it only displays what the
// server sends.

export const PROTOCOL_VERSION = 1;

export type Pos = [number, number]; // [x, y], 0-based from top-left

export type MoveLetter = "N" | "E" | "S" | "W" | "Stay";

export interface MapPayload {
  name: string;
  width: number;
  height: number;
  tiles: string[]; // '#' wall, '.' floor, 'P', 'A', 'G', 'C'
  player_start: Pos;
  ai_start: Pos;
  goals: Pos[];
  cameras: Pos[];
  map_hash: string;
}

export interface SessionCreated {
  session_id: string;
  protocol_version: number;
  map: MapPayload;
}

// null on walls, probability on floor tiles
export type BeliefGrid = (number | null)[][];

export interface StateMsg {
  type: "State";
  protocol_version: number;
  turn: number;
  agent_pos: Pos;
  ai_pos: Pos;
  goals: Pos[];
  cameras: Pos[];
  occupy_progress: number;
  sighted: boolean;
  belief_grid?: BeliefGrid;
}

export type Outcome = "agent_won" | "ai_won" | "turn_limit" | "resigned";

export interface GameOverMsg {
  type: "GameOver";
  protocol_version: number;
  outcome: Outcome;
  mean_distance: number | null;
  games_played: number;
  final: StateMsg; // terminal board, same shape as a State message
}

export interface LearningDoneMsg {
  type: "LearningDone";
  protocol_version: number;
  games_played: number;
}

export interface ErrorMsg {
  type: "Error";
  protocol_version: number;
  code:
    | "BadMessage"
    | "ProtocolVersion"
    | "UnknownSession"
    | "GameInProgress"
    | "NoLiveGame"
    | "IllegalMove";
  text: string;
}

export type ServerMsg = StateMsg | GameOverMsg | LearningDoneMsg | ErrorMsg;

export type ClientMsg =
  | { type: "NewGame" }
  | { type: "Move"; action: MoveLetter }
  | { type: "Resign" }
  | { type: "SetDebug"; on: boolean };

export function isServerMsg(value: unknown): value is ServerMsg {
  if (typeof value !== "object" || value === null) return false;
  const t = (value as { type?: unknown }).type;
  return (
    t === "State" || t === "GameOver" || t === "LearningDone" || t === "Error"
  );
}
