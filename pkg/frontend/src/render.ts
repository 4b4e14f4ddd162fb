// Canvas board renderer. Walls black, floor light, goals and cameras
// marked, avatars distinct; the optional belief overlay colors floor
// tiles on the white to dark-red ramp.

import { argmaxCell, maxBelief, rampColor } from "./overlay.js";
import type { MapPayload, Pos } from "./protocol.js";
import type { BoardView } from "./view.js";

export const TILE = 36;

const WALL = "#1d1f24";
const FLOOR = "#f3efe7";
const GRIDLINE = "rgba(0,0,0,0.08)";
const GOAL = "#c9a227";
const CAMERA = "#5b6575";
const AGENT = "#1f6fd6";
const TRACKER = "#c03028";

export function canvasSize(map: MapPayload): [number, number] {
  return [map.width * TILE, map.height * TILE];
}

export function tileAt(px: number, py: number): Pos {
  return [Math.floor(px / TILE), Math.floor(py / TILE)];
}

function isWall(map: MapPayload, x: number, y: number): boolean {
  return map.tiles[y]?.charAt(x) === "#";
}

function circle(ctx: CanvasRenderingContext2D, pos: Pos, r: number) {
  ctx.beginPath();
  ctx.arc(pos[0] * TILE + TILE / 2, pos[1] * TILE + TILE / 2, r, 0, Math.PI * 2);
}

export interface RenderOptions {
  flash?: Pos | null; // briefly highlight a blocked tile
}

export function drawBoard(
  ctx: CanvasRenderingContext2D,
  map: MapPayload,
  board: BoardView | null,
  opts: RenderOptions = {},
): void {
  const belief = board?.belief ?? null;
  const maxP = belief ? maxBelief(belief) : 0;

  for (let y = 0; y < map.height; y++) {
    for (let x = 0; x < map.width; x++) {
      if (isWall(map, x, y)) {
        ctx.fillStyle = WALL;
      } else if (belief) {
        const p = belief[y]?.[x] ?? 0;
        const [r, g, b] = rampColor(p ?? 0, maxP);
        ctx.fillStyle = `rgb(${r},${g},${b})`;
      } else {
        ctx.fillStyle = FLOOR;
      }
      ctx.fillRect(x * TILE, y * TILE, TILE, TILE);
      ctx.strokeStyle = GRIDLINE;
      ctx.strokeRect(x * TILE + 0.5, y * TILE + 0.5, TILE - 1, TILE - 1);
    }
  }

  const goals = board?.goals ?? map.goals;
  for (const g of goals) {
    ctx.strokeStyle = GOAL;
    ctx.lineWidth = 3;
    ctx.strokeRect(g[0] * TILE + 4, g[1] * TILE + 4, TILE - 8, TILE - 8);
    ctx.lineWidth = 1;
  }

  const cameras = board?.cameras ?? map.cameras;
  for (const c of cameras) {
    ctx.fillStyle = CAMERA;
    circle(ctx, c, 5);
    ctx.fill();
    ctx.strokeStyle = CAMERA;
    circle(ctx, c, 9);
    ctx.stroke();
  }

  // mark the overlay argmax so the AI's best guess is readable even
  // when the mass is spread thin
  if (belief) {
    const guess = argmaxCell(belief);
    if (guess) {
      ctx.strokeStyle = TRACKER;
      ctx.setLineDash([4, 3]);
      ctx.strokeRect(guess[0] * TILE + 2, guess[1] * TILE + 2, TILE - 4, TILE - 4);
      ctx.setLineDash([]);
    }
  }

  if (board) {
    ctx.fillStyle = AGENT;
    circle(ctx, board.agentPos, TILE * 0.32);
    ctx.fill();

    ctx.strokeStyle = TRACKER;
    ctx.lineWidth = 4;
    circle(ctx, board.aiPos, TILE * 0.3);
    ctx.stroke();
    ctx.lineWidth = 1;
  }

  if (opts.flash) {
    ctx.fillStyle = "rgba(192,48,40,0.45)";
    ctx.fillRect(opts.flash[0] * TILE, opts.flash[1] * TILE, TILE, TILE);
  }
}
