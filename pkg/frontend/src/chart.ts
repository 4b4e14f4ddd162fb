// Session chart: mean guess-to-agent distance per finished game.
// x is the game index, y the mean distance from each GameOver message.

import type { GameRecord } from "./view.js";

const AXIS = "#888";
const LINE = "#1f6fd6";
const POINT = "#c03028";

export function drawChart(
  ctx: CanvasRenderingContext2D,
  history: GameRecord[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const points = history.filter((h) => h.meanDistance !== null);
  ctx.strokeStyle = AXIS;
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  if (points.length === 0) {
    ctx.fillStyle = AXIS;
    ctx.fillText("no finished games yet", 10, height / 2);
    return;
  }

  const pad = 24;
  const maxGame = Math.max(...history.map((h) => h.gameIndex), 2);
  const maxDist = Math.max(...points.map((h) => h.meanDistance as number), 1);
  const px = (g: number) => pad + ((g - 1) / (maxGame - 1 || 1)) * (width - 2 * pad);
  const py = (d: number) => height - pad - (d / maxDist) * (height - 2 * pad);

  ctx.strokeStyle = LINE;
  ctx.beginPath();
  points.forEach((h, i) => {
    const x = px(h.gameIndex);
    const y = py(h.meanDistance as number);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();

  ctx.fillStyle = POINT;
  for (const h of points) {
    ctx.beginPath();
    ctx.arc(px(h.gameIndex), py(h.meanDistance as number), 3, 0, Math.PI * 2);
    ctx.fill();
  }

  ctx.fillStyle = AXIS;
  ctx.fillText("game", width / 2 - 12, height - 6);
  ctx.save();
  ctx.translate(10, height / 2 + 20);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("mean distance", 0, 0);
  ctx.restore();
}
