// Wire protocol shared with the sonification service: the JSON messages on
// the console WebSocket are the only contract between the two programs.

export interface AlertInfo {
  kind: string;
  magnitude: number;
  t: number;
}

export interface VoiceMix {
  gain_db: number;
  mute: boolean;
  solo: boolean;
  pan_override: number | null;
}

export interface MixerSnapshot {
  master_gain_db: number;
  voices: Record<string, VoiceMix>;
}

export interface TelemetryFrame {
  type: "telemetry";
  window: number;
  t: number;
  window_s: number;
  packets: number;
  bytes: number;
  pkt_rate: number;
  byte_rate: number;
  avg_pkt_rate: number;
  rate_ratio: number;
  by_proto: Record<string, number>;
  by_dir: Record<string, number>;
  unique_dst_ports: number;
  mean_iat: number;
  alerts: AlertInfo[];
  mixer: MixerSnapshot;
  theme: string;
  transport: "running" | "paused";
  uptime: number;
}

export interface Reply {
  type: "reply";
  ok: boolean;
  error?: string;
  snapshot?: unknown;
}

export type ServerMessage = TelemetryFrame | Reply;

// Client -> server only. There is deliberately no telemetry variant here:
// the protocol direction is enforced by this type plus a runtime guard.
export type ControlMessage =
  | { type: "set_gain"; voice: string; db: number }
  | { type: "mute"; voice: string; on: boolean }
  | { type: "solo"; voice: string; on: boolean }
  | { type: "set_pan"; voice: string; pan: number }
  | { type: "clear_pan"; voice: string }
  | { type: "set_master"; db: number }
  | { type: "set_theme"; name: string }
  | {
      type: "set_mapping";
      voice: string;
      target: string;
      variable?: string;
      curve: { type: string; in: [number, number]; out: [number, number] };
    }
  | { type: "transport"; action: "pause" | "resume" }
  | { type: "snapshot_request" };

export function parseServerMessage(text: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const msg = doc as { type?: unknown };
  if (msg.type === "telemetry" || msg.type === "reply") {
    return doc as ServerMessage;
  }
  return null;
}

export function isTelemetry(msg: ServerMessage): msg is TelemetryFrame {
  return msg.type === "telemetry";
}
