// Console state: a ring buffer of received frames plus mirrors of the
// server's mixer/theme/transport. Everything rendered comes from telemetry
// frames; the console never recomputes aggregates on its own.

import type { AlertInfo, MixerSnapshot, TelemetryFrame } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface AlertEntry extends AlertInfo {
  window: number;
}

export const PLOTTABLE_VARIABLES = [
  "pkt_rate",
  "avg_pkt_rate",
  "byte_rate",
  "rate_ratio",
  "unique_dst_ports",
  "mean_iat",
  "by_proto.tcp",
  "by_proto.udp",
  "by_proto.icmp",
  "by_proto.other",
  "by_dir.in",
  "by_dir.out",
  "by_dir.internal",
  "by_dir.external",
] as const;

export type VariableKey = (typeof PLOTTABLE_VARIABLES)[number];

/** Projection of one frame field; no derived math happens client-side. */
export function frameValue(frame: TelemetryFrame, key: VariableKey): number {
  if (key.startsWith("by_proto.")) {
    return frame.by_proto[key.slice("by_proto.".length)] ?? 0;
  }
  if (key.startsWith("by_dir.")) {
    return frame.by_dir[key.slice("by_dir.".length)] ?? 0;
  }
  return frame[key as "pkt_rate"];
}

const MAX_ALERT_LOG = 200;

export class ConsoleState {
  status: ConnectionStatus = "connecting";
  frames: TelemetryFrame[] = [];
  alerts: AlertEntry[] = [];
  selected: VariableKey[] = ["pkt_rate", "avg_pkt_rate"];
  mixer: MixerSnapshot | null = null;
  theme: string | null = null;
  transport: string = "running";

  constructor(public capacity: number = 600) {}

  pushFrame(frame: TelemetryFrame): void {
    this.frames.push(frame);
    if (this.frames.length > this.capacity) {
      this.frames.splice(0, this.frames.length - this.capacity);
    }
    this.mixer = frame.mixer;
    this.theme = frame.theme;
    this.transport = frame.transport;
    for (const alert of frame.alerts) {
      this.alerts.push({ ...alert, window: frame.window });
    }
    if (this.alerts.length > MAX_ALERT_LOG) {
      this.alerts.splice(0, this.alerts.length - MAX_ALERT_LOG);
    }
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
  }

  toggleVariable(key: VariableKey): void {
    const index = this.selected.indexOf(key);
    if (index >= 0) this.selected.splice(index, 1);
    else this.selected.push(key);
  }

  latest(): TelemetryFrame | null {
    return this.frames.length ? this.frames[this.frames.length - 1] : null;
  }

  clearBuffer(): void {
    // on reconnect the server replays its history; drop ours so the ring
    // buffer mirrors the server's view instead of duplicating windows
    this.frames = [];
    this.alerts = [];
  }
}
