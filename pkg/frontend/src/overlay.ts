// Belief overlay color math. Pure functions, no DOM, so the replay
// test can check the display invariants directly.

import type { BeliefGrid, Pos } from "./protocol.js";

const WHITE: [number, number, number] = [255, 255, 255];
const DARK_RED: [number, number, number] = [139, 0, 0];

// White for zero mass, dark red for the maximum; matches the server's
// heatmap exports so saved PPMs and the live overlay agree.
export function rampColor(p: number, maxP: number): [number, number, number] {
  if (p <= 0 || maxP <= 0) return WHITE;
  const t = p / maxP;
  return [
    Math.round(WHITE[0] + t * (DARK_RED[0] - WHITE[0])),
    Math.round(WHITE[1] + t * (DARK_RED[1] - WHITE[1])),
    Math.round(WHITE[2] + t * (DARK_RED[2] - WHITE[2])),
  ];
}

export function maxBelief(grid: BeliefGrid): number {
  let best = 0;
  for (const row of grid) {
    for (const cell of row) {
      if (cell !== null && cell > best) best = cell;
    }
  }
  return best;
}

// Row-major scan with a strict comparison: ties go to the first (lowest
// index) tile, the same rule the server uses for its own estimate.
export function argmaxCell(grid: BeliefGrid): Pos | null {
  let best = -1;
  let at: Pos | null = null;
  for (let y = 0; y < grid.length; y++) {
    const row = grid[y]!;
    for (let x = 0; x < row.length; x++) {
      const cell = row[x];
      if (cell !== null && cell !== undefined && cell > best) {
        best = cell;
        at = [x, y];
      }
    }
  }
  return at;
}
