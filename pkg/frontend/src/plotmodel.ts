// Pure data preparation for the combined traffic plot: series extraction,
// ranges, and alert markers. The canvas renderer consumes this directly.

import type { TelemetryFrame } from "./protocol.js";
import { frameValue, type VariableKey } from "./state.js";

export interface SeriesPoint {
  t: number;
  y: number;
}

export interface PlotSeries {
  key: VariableKey;
  points: SeriesPoint[];
}

export interface PlotMarker {
  t: number;
  kind: string;
}

export interface PlotData {
  series: PlotSeries[];
  markers: PlotMarker[];
  tMin: number;
  tMax: number;
  yMin: number;
  yMax: number;
}

export function buildPlotData(
  frames: TelemetryFrame[],
  keys: VariableKey[],
): PlotData {
  const series: PlotSeries[] = keys.map((key) => ({
    key,
    points: frames.map((frame) => ({ t: frame.t, y: frameValue(frame, key) })),
  }));
  const markers: PlotMarker[] = [];
  for (const frame of frames) {
    for (const alert of frame.alerts) {
      markers.push({ t: alert.t, kind: alert.kind });
    }
  }
  let yMin = 0; // traffic variables are non-negative except dir balance-ish
  let yMax = 1;
  let tMin = 0;
  let tMax = 1;
  if (frames.length) {
    tMin = frames[0].t;
    tMax = Math.max(frames[frames.length - 1].t, tMin + 1e-9);
    const ys = series.flatMap((s) => s.points.map((p) => p.y));
    if (ys.length) {
      yMin = Math.min(0, ...ys);
      yMax = Math.max(1e-9, ...ys);
    }
  }
  return { series, markers, tMin, tMax, yMin, yMax };
}
