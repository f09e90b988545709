// WebSocket session with automatic reconnection and exponential backoff.
// The socket constructor and timer are injectable so tests can drive the
// connection deterministically without a network.

import type { ControlMessage, Reply, TelemetryFrame } from "./protocol.js";
import { isTelemetry, parseServerMessage } from "./protocol.js";
import type { ConnectionStatus } from "./state.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;
export type Scheduler = (fn: () => void, ms: number) => void;

export interface ConnectionEvents {
  onFrame?: (frame: TelemetryFrame) => void;
  onReply?: (reply: Reply) => void;
  onStatus?: (status: ConnectionStatus) => void;
  onReconnect?: () => void; // fired when a NEW session opens after a drop
}

export interface ConnectionOptions {
  socketFactory?: SocketFactory;
  scheduler?: Scheduler;
  backoffMs?: number;
  maxBackoffMs?: number;
}

const defaultFactory: SocketFactory = (url) =>
  new WebSocket(url) as unknown as SocketLike;

export class ConsoleConnection {
  private socket: SocketLike | null = null;
  private backoff: number;
  private readonly initialBackoff: number;
  private readonly maxBackoff: number;
  private readonly factory: SocketFactory;
  private readonly schedule: Scheduler;
  private closedByUser = false;
  private everConnected = false;
  sentCount = 0;

  constructor(
    private url: string,
    private events: ConnectionEvents = {},
    options: ConnectionOptions = {},
  ) {
    this.factory = options.socketFactory ?? defaultFactory;
    this.schedule = options.scheduler ?? ((fn, ms) => setTimeout(fn, ms));
    this.initialBackoff = options.backoffMs ?? 500;
    this.maxBackoff = options.maxBackoffMs ?? 8000;
    this.backoff = this.initialBackoff;
  }

  connect(): void {
    this.closedByUser = false;
    this.events.onStatus?.("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.backoff = this.initialBackoff;
      if (this.everConnected) this.events.onReconnect?.();
      this.everConnected = true;
      this.events.onStatus?.("connected");
    };
    socket.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg === null) return; // unparseable frames are dropped, not fatal
      if (isTelemetry(msg)) this.events.onFrame?.(msg);
      else this.events.onReply?.(msg);
    };
    socket.onerror = () => {
      // the close handler owns reconnection; nothing to do here
    };
    socket.onclose = () => {
      if (this.socket !== socket) return; // superseded session
      this.socket = null;
      this.events.onStatus?.("disconnected");
      if (this.closedByUser) return;
      const delay = this.backoff;
      this.backoff = Math.min(this.backoff * 2, this.maxBackoff);
      this.schedule(() => {
        if (!this.closedByUser) this.connect();
      }, delay);
    };
  }

  /** Send one control message. Exactly one wire message per call. */
  send(msg: ControlMessage): void {
    if ((msg as { type: string }).type === "telemetry") {
      throw new Error("consoles never send telemetry; protocol direction violated");
    }
    if (this.socket === null) {
      throw new Error("not connected");
    }
    this.socket.send(JSON.stringify(msg));
    this.sentCount += 1;
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  close(): void {
    this.closedByUser = true;
    this.socket?.close();
    this.socket = null;
  }
}
