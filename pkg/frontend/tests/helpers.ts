// Test utilities: deterministic fake socket/scheduler and frame builders.

import type { SocketLike } from "../src/connection.js";
import type { MixerSnapshot, TelemetryFrame } from "../src/protocol.js";

export class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  // server-side controls for tests
  serverOpen(): void {
    this.onopen?.();
  }

  serverMessage(payload: unknown): void {
    const data = typeof payload === "string" ? payload : JSON.stringify(payload);
    this.onmessage?.({ data });
  }

  serverDrop(): void {
    this.onclose?.();
  }
}

export interface ScheduledTask {
  fn: () => void;
  ms: number;
}

export class FakeScheduler {
  tasks: ScheduledTask[] = [];

  schedule = (fn: () => void, ms: number): void => {
    this.tasks.push({ fn, ms });
  };

  runNext(): number {
    const task = this.tasks.shift();
    if (!task) throw new Error("nothing scheduled");
    task.fn();
    return task.ms;
  }
}

export function defaultMixer(): MixerSnapshot {
  return {
    master_gain_db: -6,
    voices: {
      bed: { gain_db: 0, mute: false, solo: false, pan_override: null },
      grains: { gain_db: 0, mute: false, solo: false, pan_override: null },
      tone: { gain_db: 0, mute: false, solo: false, pan_override: null },
      alert: { gain_db: 0, mute: false, solo: false, pan_override: null },
    },
  };
}

export function makeFrame(overrides: Partial<TelemetryFrame> = {}): TelemetryFrame {
  return {
    type: "telemetry",
    window: 0,
    t: 1.0,
    window_s: 1.0,
    packets: 50,
    bytes: 4000,
    pkt_rate: 50,
    byte_rate: 4000,
    avg_pkt_rate: 48,
    rate_ratio: 1.04,
    by_proto: { tcp: 30, udp: 15, icmp: 5, other: 0 },
    by_dir: { in: 20, out: 28, internal: 2, external: 0 },
    unique_dst_ports: 12,
    mean_iat: 0.02,
    alerts: [],
    mixer: defaultMixer(),
    theme: "abstract",
    transport: "running",
    uptime: 5.0,
    ...overrides,
  };
}
