// WebSocket wrapper: JSON in, JSON out, automatic reconnect. While the
// socket is down the UI shows a banner and accepts no input.

import { isServerMsg, type ClientMsg, type ServerMsg } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export class GameSocket {
  private ws: WebSocket | null = null;
  private url: string;
  private closedByUs = false;

  constructor(
    sessionId: string,
    private onMessage: (msg: ServerMsg) => void,
    private onStatus: (status: ConnectionStatus) => void,
  ) {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    this.url = `${proto}://${location.host}/ws/${sessionId}`;
    this.open();
  }

  private open(): void {
    this.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.addEventListener("open", () => this.onStatus("open"));
    this.ws.addEventListener("message", (ev) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(ev.data as string);
      } catch {
        return; // not ours to interpret
      }
      if (isServerMsg(parsed)) this.onMessage(parsed);
    });
    this.ws.addEventListener("close", () => {
      this.onStatus("closed");
      if (!this.closedByUs) {
        setTimeout(() => this.open(), 2000);
      }
    });
  }

  send(msg: ClientMsg): boolean {
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.closedByUs = true;
    this.ws?.close();
  }
}
