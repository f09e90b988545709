// Headless mixer panel model: channel strips mirroring the server's mixer.
//
// Read-back discipline: interactions send a control message but never
// update the local value optimistically; strips settle at whatever the next
// telemetry frame (the server's truth) reports. That keeps any number of
// consoles operating one service convergent.

import type { ControlMessage, Reply, TelemetryFrame } from "./protocol.js";

export interface Strip {
  id: string;
  gain_db: number;
  mute: boolean;
  solo: boolean;
  pan_override: number | null;
}

export class MixerPanel {
  strips = new Map<string, Strip>();
  masterGainDb = 0;
  theme: string | null = null;

  constructor(
    private send: (msg: ControlMessage) => void,
    private onToast?: (text: string) => void,
  ) {}

  /** Returns true when the strip list itself changed (e.g. theme switch). */
  applyFrame(frame: TelemetryFrame): boolean {
    const incoming = Object.keys(frame.mixer.voices);
    const rebuilt =
      frame.theme !== this.theme ||
      incoming.length !== this.strips.size ||
      incoming.some((id) => !this.strips.has(id));
    if (rebuilt) this.strips.clear();
    for (const id of incoming) {
      const mix = frame.mixer.voices[id];
      this.strips.set(id, {
        id,
        gain_db: mix.gain_db,
        mute: mix.mute,
        solo: mix.solo,
        pan_override: mix.pan_override,
      });
    }
    this.masterGainDb = frame.mixer.master_gain_db;
    this.theme = frame.theme;
    return rebuilt;
  }

  applyReply(reply: Reply): void {
    if (!reply.ok) {
      this.onToast?.(reply.error ?? "control rejected");
      // no local rollback needed: values only ever come from telemetry
    }
  }

  // each interaction emits exactly one control message

  setGain(voice: string, db: number): void {
    this.send({ type: "set_gain", voice, db });
  }

  setMaster(db: number): void {
    this.send({ type: "set_master", db });
  }

  toggleMute(voice: string): void {
    const current = this.strips.get(voice)?.mute ?? false;
    this.send({ type: "mute", voice, on: !current });
  }

  toggleSolo(voice: string): void {
    const current = this.strips.get(voice)?.solo ?? false;
    this.send({ type: "solo", voice, on: !current });
  }

  setPan(voice: string, pan: number): void {
    this.send({ type: "set_pan", voice, pan });
  }

  clearPan(voice: string): void {
    this.send({ type: "clear_pan", voice });
  }

  selectTheme(name: string): void {
    this.send({ type: "set_theme", name });
  }

  setTransport(action: "pause" | "resume"): void {
    this.send({ type: "transport", action });
  }

  stripIds(): string[] {
    return [...this.strips.keys()];
  }
}
