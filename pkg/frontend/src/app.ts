// Browser entry point: wires the connection, state, plot, and mixer panel
// into the DOM. All state mutations happen in message/interaction handlers.

import { ConsoleConnection } from "./connection.js";
import { MixerPanel } from "./mixer.js";
import { buildPlotData } from "./plotmodel.js";
import { PlotView, seriesColor } from "./plot.js";
import { ConsoleState, PLOTTABLE_VARIABLES, type VariableKey } from "./state.js";
import type { Reply, TelemetryFrame } from "./protocol.js";

const THEMES = ["forest", "city", "abstract"];

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function wsUrl(): string {
  const params = new URLSearchParams(location.search);
  const explicit = params.get("ws");
  if (explicit) return explicit;
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/ws`;
}

function toast(text: string): void {
  const el = byId<HTMLDivElement>("toasts");
  const node = document.createElement("div");
  node.className = "toast";
  node.textContent = text;
  el.appendChild(node);
  setTimeout(() => node.remove(), 4000);
}

const state = new ConsoleState();
const plot = new PlotView(byId<HTMLCanvasElement>("plot"));

const connection = new ConsoleConnection(wsUrl(), {
  onFrame: handleFrame,
  onReply: handleReply,
  onStatus: (status) => {
    state.setStatus(status);
    const el = byId<HTMLSpanElement>("status");
    el.textContent = status;
    el.dataset.status = status;
  },
  onReconnect: () => state.clearBuffer(), // history replay follows
});

const panel = new MixerPanel((msg) => connection.send(msg), toast);

function handleFrame(frame: TelemetryFrame): void {
  state.pushFrame(frame);
  if (panel.applyFrame(frame)) renderStrips();
  else refreshStripValues();
  byId<HTMLSpanElement>("theme").textContent = frame.theme;
  byId<HTMLSpanElement>("transport").textContent = frame.transport;
  byId<HTMLSpanElement>("rate").textContent = `${frame.pkt_rate.toFixed(1)} pkt/s`;
  renderAlerts();
  redraw();
}

function handleReply(reply: Reply): void {
  panel.applyReply(reply);
  refreshStripValues(); // controls revert to telemetry truth on errors
}

function redraw(): void {
  plot.draw(buildPlotData(state.frames, state.selected));
}

// --- variable checkboxes -----------------------------------------------------

function renderVariablePicker(): void {
  const host = byId<HTMLDivElement>("variables");
  host.innerHTML = "";
  PLOTTABLE_VARIABLES.forEach((key, index) => {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.selected.includes(key);
    box.addEventListener("change", () => {
      state.toggleVariable(key as VariableKey);
      redraw();
    });
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    const selectedIndex = state.selected.indexOf(key as VariableKey);
    swatch.style.background =
      selectedIndex >= 0 ? seriesColor(selectedIndex) : "#444";
    label.append(box, swatch, key);
    host.appendChild(label);
  });
}

// --- channel strips -------------------------------------------------------------

function renderStrips(): void {
  const host = byId<HTMLDivElement>("strips");
  host.innerHTML = "";
  for (const strip of panel.strips.values()) {
    const div = document.createElement("div");
    div.className = "strip";
    div.dataset.voice = strip.id;

    const name = document.createElement("div");
    name.className = "strip-name";
    name.textContent = strip.id;

    const gain = document.createElement("input");
    gain.type = "range";
    gain.min = "-60";
    gain.max = "12";
    gain.step = "0.5";
    gain.value = String(strip.gain_db);
    gain.className = "gain";
    // 'change' fires once per drag: one interaction, one control message
    gain.addEventListener("change", () =>
      panel.setGain(strip.id, Number(gain.value)),
    );

    const gainLabel = document.createElement("span");
    gainLabel.className = "gain-label";
    gainLabel.textContent = `${strip.gain_db.toFixed(1)} dB`;

    const mute = document.createElement("button");
    mute.textContent = "M";
    mute.className = strip.mute ? "on mute" : "mute";
    mute.addEventListener("click", () => panel.toggleMute(strip.id));

    const solo = document.createElement("button");
    solo.textContent = "S";
    solo.className = strip.solo ? "on solo" : "solo";
    solo.addEventListener("click", () => panel.toggleSolo(strip.id));

    const pan = document.createElement("input");
    pan.type = "range";
    pan.min = "-1";
    pan.max = "1";
    pan.step = "0.05";
    pan.className = "pan";
    pan.value = String(strip.pan_override ?? 0);
    pan.addEventListener("change", () =>
      panel.setPan(strip.id, Number(pan.value)),
    );

    div.append(name, gain, gainLabel, mute, solo, pan);
    host.appendChild(div);
  }
  refreshStripValues();
}

function refreshStripValues(): void {
  for (const strip of panel.strips.values()) {
    const root = document.querySelector<HTMLDivElement>(
      `.strip[data-voice="${strip.id}"]`,
    );
    if (!root) continue;
    const gain = root.querySelector<HTMLInputElement>(".gain");
    const label = root.querySelector<HTMLSpanElement>(".gain-label");
    const mute = root.querySelector<HTMLButtonElement>(".mute");
    const solo = root.querySelector<HTMLButtonElement>(".solo");
    const pan = root.querySelector<HTMLInputElement>(".pan");
    if (gain && document.activeElement !== gain) gain.value = String(strip.gain_db);
    if (label) label.textContent = `${strip.gain_db.toFixed(1)} dB`;
    if (mute) mute.className = strip.mute ? "on mute" : "mute";
    if (solo) solo.className = strip.solo ? "on solo" : "solo";
    if (pan && document.activeElement !== pan)
      pan.value = String(strip.pan_override ?? 0);
  }
  const master = byId<HTMLInputElement>("master");
  if (document.activeElement !== master) master.value = String(panel.masterGainDb);
  byId<HTMLSpanElement>("master-label").textContent =
    `${panel.masterGainDb.toFixed(1)} dB`;
  const picker = byId<HTMLSelectElement>("theme-picker");
  if (panel.theme && picker.value !== panel.theme) picker.value = panel.theme;
}

function renderAlerts(): void {
  const host = byId<HTMLUListElement>("alerts");
  host.innerHTML = "";
  for (const alert of state.alerts.slice(-12).reverse()) {
    const li = document.createElement("li");
    li.className = alert.kind;
    li.textContent = `${alert.kind} x${alert.magnitude.toFixed(2)} @ window ${alert.window}`;
    host.appendChild(li);
  }
}

// --- static controls ----------------------------------------------------------------

function wireStaticControls(): void {
  const master = byId<HTMLInputElement>("master");
  master.addEventListener("change", () => panel.setMaster(Number(master.value)));

  const picker = byId<HTMLSelectElement>("theme-picker");
  for (const name of THEMES) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    picker.appendChild(option);
  }
  picker.addEventListener("change", () => panel.selectTheme(picker.value));

  byId<HTMLButtonElement>("pause").addEventListener("click", () =>
    panel.setTransport("pause"),
  );
  byId<HTMLButtonElement>("resume").addEventListener("click", () =>
    panel.setTransport("resume"),
  );
}

renderVariablePicker();
wireStaticControls();
connection.connect();
