// Keyboard and click input. Arrows (or WASD) move, space stays; a
// click on the agent's tile stays, a click on an adjacent tile moves
// toward it. The handlers only translate events into move letters, the
// server decides whether a move is legal.

import type { MoveLetter, Pos } from "./protocol.js";
import { tileAt } from "./render.js";

const KEYMAP: Record<string, MoveLetter> = {
  ArrowUp: "N",
  ArrowRight: "E",
  ArrowDown: "S",
  ArrowLeft: "W",
  w: "N",
  d: "E",
  s: "S",
  a: "W",
  " ": "Stay",
};

export function moveForKey(key: string): MoveLetter | null {
  return KEYMAP[key] ?? null;
}

export function moveForClick(
  canvasX: number,
  canvasY: number,
  agent: Pos,
): MoveLetter | null {
  const [tx, ty] = tileAt(canvasX, canvasY);
  const dx = tx - agent[0];
  const dy = ty - agent[1];
  if (dx === 0 && dy === 0) return "Stay";
  if (dx === 0 && dy === -1) return "N";
  if (dx === 1 && dy === 0) return "E";
  if (dx === 0 && dy === 1) return "S";
  if (dx === -1 && dy === 0) return "W";
  return null; // not adjacent, ignore
}

export function attachInput(
  canvas: HTMLCanvasElement,
  getAgent: () => Pos | null,
  submit: (move: MoveLetter) => void,
): void {
  window.addEventListener("keydown", (ev) => {
    const move = moveForKey(ev.key);
    if (move) {
      ev.preventDefault();
      submit(move);
    }
  });
  canvas.addEventListener("click", (ev) => {
    const agent = getAgent();
    if (!agent) return;
    const rect = canvas.getBoundingClientRect();
    const move = moveForClick(ev.clientX - rect.left, ev.clientY - rect.top, agent);
    if (move) submit(move);
  });
}
