/**
 * Relay client: hello/subscribe/publish over the broker's WebSocket
 * endpoint, with auto-reconnect. Outbound envelopes are canonically
 * encoded; a publish callback lets tests capture the exact bytes sent.
 */

import { EnvelopeObj, Json, canonicalJson, encodeEnvelope } from "./protocol.js";

export interface RelayHandlers {
  onDeliver: (env: EnvelopeObj) => void;
  onStatus?: (connected: boolean, detail: string) => void;
  onSent?: (bytes: string) => void;
}

export class RelayClient {
  private ws: WebSocket | null = null;
  private url: string;
  private closed = false;
  private retryMs = 500;

  constructor(
    public clientId: string,
    url: string,
    public subscriptions: string[],
    private handlers: RelayHandlers,
  ) {
    this.url = url;
  }

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.retryMs = 500;
      this.sendOp({ op: "hello", client_id: this.clientId });
      for (const pattern of this.subscriptions) {
        this.sendOp({ op: "subscribe", pattern });
      }
      this.handlers.onStatus?.(true, "connected");
    };
    ws.onmessage = (event) => {
      const obj = JSON.parse(String(event.data));
      if (obj.op === "deliver") {
        this.handlers.onDeliver(obj.env as EnvelopeObj);
      } else if (obj.op === "ack" && obj.ok === false) {
        console.warn("relay error ack", obj);
      } else if (obj.op === "event" && obj.event === "evicted") {
        this.handlers.onStatus?.(false, "evicted (another session?)");
      }
    };
    ws.onclose = () => {
      this.handlers.onStatus?.(false, "disconnected");
      if (!this.closed) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 5000);
      }
    };
    ws.onerror = () => ws.close();
  }

  private sendOp(obj: { [key: string]: Json }): void {
    this.ws?.send(JSON.stringify(obj));
  }

  publish(env: EnvelopeObj): void {
    // the envelope itself is canonical; the op wrapper is plain JSON
    const bytes = encodeEnvelope(env);
    this.handlers.onSent?.(bytes);
    this.ws?.send('{"op":"publish","env":' + bytes + "}");
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}

export function wsUrlFor(host: string, wsPort: number): string {
  return `ws://${host}:${wsPort}`;
}

export { canonicalJson };
