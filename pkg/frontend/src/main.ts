// Entry point: create a session over HTTP, open the WebSocket, then
// keep the page a pure function of the reducer state plus connection
// status. All game rules live on the server.

import { drawChart } from "./chart.js";
import { attachInput } from "./input.js";
import {
  PROTOCOL_VERSION,
  type MoveLetter,
  type Pos,
  type SessionCreated,
} from "./protocol.js";
import { canvasSize, drawBoard } from "./render.js";
import { applyServer, emptyView } from "./view.js";
import { GameSocket, type ConnectionStatus } from "./ws.js";

const DELTA: Record<MoveLetter, [number, number]> = {
  N: [0, -1],
  E: [1, 0],
  S: [0, 1],
  W: [-1, 0],
  Stay: [0, 0],
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

async function boot(): Promise<void> {
  const res = await fetch("/sessions", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({}),
  });
  if (!res.ok) throw new Error(`session creation failed: ${res.status}`);
  const session = (await res.json()) as SessionCreated;
  if (session.protocol_version !== PROTOCOL_VERSION) {
    throw new Error(`server speaks protocol ${session.protocol_version}`);
  }

  const board = el<HTMLCanvasElement>("board");
  const chart = el<HTMLCanvasElement>("chart");
  const banner = el<HTMLDivElement>("banner");
  const statusLine = el<HTMLDivElement>("status");
  const errorLine = el<HTMLDivElement>("errorline");
  const historyList = el<HTMLUListElement>("history");
  const debugToggle = el<HTMLInputElement>("debug");

  const [w, h] = canvasSize(session.map);
  board.width = w;
  board.height = h;
  const boardCtx = board.getContext("2d");
  const chartCtx = chart.getContext("2d");
  if (!boardCtx || !chartCtx) throw new Error("canvas unsupported");

  let view = emptyView();
  let status: ConnectionStatus = "connecting";
  let flash: Pos | null = null;
  let flashTimer: number | undefined;
  let lastMove: MoveLetter | null = null;

  function redraw(): void {
    drawBoard(boardCtx!, session.map, view.board, { flash });
    drawChart(chartCtx!, view.history, chart.width, chart.height);
    banner.hidden = status === "open";
    banner.textContent =
      status === "connecting" ? "connecting..." : "connection lost, retrying";

    const b = view.board;
    const parts: string[] = [];
    if (b) {
      parts.push(`turn ${b.turn}`);
      parts.push(`goal hold ${b.occupyProgress}`);
      if (b.sighted) parts.push("SIGHTED");
    }
    if (!view.live && view.history.length > 0) {
      const last = view.history[view.history.length - 1]!;
      parts.push(`game ${last.gameIndex}: ${last.outcome}`);
    }
    if (view.learning) parts.push("tracker is studying your games...");
    statusLine.textContent = parts.join("  |  ") || "press New game";

    errorLine.textContent = view.lastError
      ? `${view.lastError.code}: ${view.lastError.text}`
      : "";

    historyList.replaceChildren(
      ...view.history.map((rec) => {
        const item = document.createElement("li");
        const dist =
          rec.meanDistance === null ? "-" : rec.meanDistance.toFixed(2);
        item.textContent = `game ${rec.gameIndex}: ${rec.outcome}, mean distance ${dist}`;
        return item;
      }),
    );
  }

  const sock = new GameSocket(
    session.session_id,
    (msg) => {
      if (
        msg.type === "Error" &&
        msg.code === "IllegalMove" &&
        lastMove !== null &&
        view.board
      ) {
        const [dx, dy] = DELTA[lastMove];
        flash = [view.board.agentPos[0] + dx, view.board.agentPos[1] + dy];
        window.clearTimeout(flashTimer);
        flashTimer = window.setTimeout(() => {
          flash = null;
          redraw();
        }, 350);
      }
      view = applyServer(view, msg);
      redraw();
    },
    (s) => {
      status = s;
      redraw();
    },
  );

  function submit(move: MoveLetter): void {
    // one Move per turn, only while connected with a live game
    if (status !== "open" || !view.live) return;
    lastMove = move;
    sock.send({ type: "Move", action: move });
  }

  attachInput(board, () => view.board?.agentPos ?? null, submit);

  el<HTMLButtonElement>("newgame").addEventListener("click", () => {
    if (status === "open") sock.send({ type: "NewGame" });
  });
  el<HTMLButtonElement>("resign").addEventListener("click", () => {
    if (status === "open") sock.send({ type: "Resign" });
  });
  debugToggle.addEventListener("change", () => {
    if (status === "open") sock.send({ type: "SetDebug", on: debugToggle.checked });
  });

  redraw();
}

boot().catch((err) => {
  const banner = document.getElementById("banner");
  if (banner) {
    banner.hidden = false;
    banner.textContent = String(err);
  }
});
