// Protocol round trip: a transcript recorded from the real service is
// replayed through the view reducer, and the resulting board states are
// compared against headless engine states captured for the same move
// sequence (stored alongside the messages in the fixture). The belief
// overlay's most-colored tile must equal the engine's reported argmax
// on every debug frame.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { argmaxCell, maxBelief, rampColor } from "../src/overlay.js";
import type {
  BeliefGrid,
  GameOverMsg,
  MapPayload,
  Pos,
  ServerMsg,
} from "../src/protocol.js";
import { applyServer, emptyView, type ClientGameView } from "../src/view.js";

interface EngineExpectation {
  turn: number;
  agent: Pos;
  ai: Pos;
  occupy: number;
  sighted: boolean;
  argmax: Pos;
  live: boolean;
}

interface Exchange {
  send: Record<string, unknown>;
  recv: ServerMsg[];
  expect: EngineExpectation | null;
}

interface Fixture {
  map: MapPayload;
  protocol_version: number;
  entries: Exchange[];
  total_messages: number;
}

const here = dirname(fileURLToPath(import.meta.url));
const fixture: Fixture = JSON.parse(
  readFileSync(join(here, "fixtures", "replay_transcript.json"), "utf-8"),
);

function replayAll(): {
  finalView: ClientGameView;
  checkedBoards: number;
  debugFrames: BeliefGrid[];
} {
  let view = emptyView();
  let checkedBoards = 0;
  const debugFrames: BeliefGrid[] = [];

  for (const entry of fixture.entries) {
    for (const msg of entry.recv) {
      view = applyServer(view, msg);
      if (msg.type === "State" && msg.belief_grid) {
        debugFrames.push(msg.belief_grid);
      }
      if (msg.type === "GameOver" && msg.final.belief_grid) {
        debugFrames.push(msg.final.belief_grid);
      }
    }
    const want = entry.expect;
    if (!want) continue;

    // board state identical to the headless engine state
    expect(view.board, JSON.stringify(entry.send)).not.toBeNull();
    const board = view.board!;
    expect(board.turn).toBe(want.turn);
    expect(board.agentPos).toEqual(want.agent);
    expect(board.aiPos).toEqual(want.ai);
    expect(board.occupyProgress).toBe(want.occupy);
    expect(board.sighted).toBe(want.sighted);
    expect(view.live).toBe(want.live);

    // overlay argmax equals the server-side estimate on debug frames
    if (board.belief) {
      expect(argmaxCell(board.belief)).toEqual(want.argmax);
    }
    checkedBoards += 1;
  }
  return { finalView: view, checkedBoards, debugFrames };
}

describe("transcript replay through the view layer", () => {
  it("board states match the headless engine at every exchange", () => {
    const { checkedBoards } = replayAll();
    expect(checkedBoards).toBeGreaterThanOrEqual(20);
  });

  it("transcript is long enough to count", () => {
    const total = fixture.entries.reduce((n, e) => n + e.recv.length, 0);
    expect(total).toBe(fixture.total_messages);
    expect(total).toBeGreaterThanOrEqual(30);
  });

  it("display normalization never moves the argmax", () => {
    const { debugFrames } = replayAll();
    expect(debugFrames.length).toBeGreaterThan(0);
    for (const grid of debugFrames) {
      const top = argmaxCell(grid);
      expect(top).not.toBeNull();
      const [tx, ty] = top!;
      const maxP = maxBelief(grid);
      const topColor = rampColor(grid[ty]![tx]!, maxP);
      // the argmax tile lands on the dark end of the ramp exactly
      expect(topColor).toEqual([139, 0, 0]);
      for (let y = 0; y < grid.length; y++) {
        for (let x = 0; x < grid[y]!.length; x++) {
          const p = grid[y]![x];
          if (p === null || p === undefined) continue;
          const [, g] = rampColor(p, maxP);
          // green decreases as mass grows: nobody may be darker than
          // the argmax, and matching its shade takes near-equal mass
          // (the channel is quantized to 255 steps)
          expect(g).toBeGreaterThanOrEqual(topColor[1]);
          if (g === topColor[1]) {
            expect(p / maxP).toBeGreaterThan(1 - 1 / 254);
          }
        }
      }
    }
  });

  it("session history mirrors the GameOver payloads", () => {
    const { finalView } = replayAll();
    const overs: GameOverMsg[] = [];
    for (const entry of fixture.entries) {
      for (const msg of entry.recv) {
        if (msg.type === "GameOver") overs.push(msg);
      }
    }
    expect(finalView.history.length).toBe(overs.length);
    overs.forEach((msg, i) => {
      const rec = finalView.history[i]!;
      expect(rec.gameIndex).toBe(msg.games_played);
      expect(rec.meanDistance).toBe(msg.mean_distance);
      expect(rec.outcome).toBe(msg.outcome);
    });
    expect(finalView.learning).toBe(false);
    expect(finalView.gamesPlayed).toBe(2);
  });

  it("errors leave the board untouched", () => {
    let view = emptyView();
    let lastBoard = view.board;
    for (const entry of fixture.entries) {
      for (const msg of entry.recv) {
        const before = view.board;
        view = applyServer(view, msg);
        if (msg.type === "Error") {
          expect(view.board).toBe(before);
          expect(view.lastError?.code).toBe(msg.code);
        } else {
          expect(view.lastError).toBeNull();
        }
        lastBoard = view.board;
      }
    }
    expect(lastBoard).not.toBeNull();
  });
});
