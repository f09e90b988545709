// Canvas renderer for the combined plot. Redrawing 600 points per series at
// one frame per second is cheap, so each update is a clean full paint with
// no incremental bookkeeping to get wrong.

import type { PlotData } from "./plotmodel.js";

const SERIES_COLORS = [
  "#4cc9f0",
  "#f72585",
  "#ffd166",
  "#80ed99",
  "#b5179e",
  "#ff9f1c",
  "#90e0ef",
  "#d4a373",
];

const MARGIN = { left: 56, right: 12, top: 10, bottom: 22 };

export class PlotView {
  constructor(private canvas: HTMLCanvasElement) {}

  draw(data: PlotData): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10131a";
    ctx.fillRect(0, 0, width, height);

    const plotW = width - MARGIN.left - MARGIN.right;
    const plotH = height - MARGIN.top - MARGIN.bottom;
    if (plotW <= 0 || plotH <= 0) return;

    const xOf = (t: number) =>
      MARGIN.left + ((t - data.tMin) / (data.tMax - data.tMin)) * plotW;
    const span = data.yMax - data.yMin || 1;
    const yOf = (y: number) =>
      MARGIN.top + plotH - ((y - data.yMin) / span) * plotH;

    ctx.strokeStyle = "#2a2f3a";
    ctx.fillStyle = "#8b94a7";
    ctx.font = "10px system-ui, sans-serif";
    ctx.lineWidth = 1;
    const gridLines = 4;
    for (let i = 0; i <= gridLines; i++) {
      const value = data.yMin + (span * i) / gridLines;
      const y = yOf(value);
      ctx.beginPath();
      ctx.moveTo(MARGIN.left, y);
      ctx.lineTo(width - MARGIN.right, y);
      ctx.stroke();
      ctx.fillText(formatTick(value), 4, y + 3);
    }

    for (const marker of data.markers) {
      const x = xOf(marker.t);
      ctx.strokeStyle = marker.kind === "rate_spike" ? "#e63946" : "#f4a261";
      ctx.beginPath();
      ctx.moveTo(x, MARGIN.top);
      ctx.lineTo(x, MARGIN.top + plotH);
      ctx.stroke();
    }

    data.series.forEach((series, index) => {
      ctx.strokeStyle = SERIES_COLORS[index % SERIES_COLORS.length];
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      series.points.forEach((point, i) => {
        const x = xOf(point.t);
        const y = yOf(point.y);
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.stroke();
    });
  }
}

export function seriesColor(index: number): string {
  return SERIES_COLORS[index % SERIES_COLORS.length];
}

function formatTick(value: number): string {
  if (Math.abs(value) >= 1_000_000) return `${(value / 1_000_000).toFixed(1)}M`;
  if (Math.abs(value) >= 1000) return `${(value / 1000).toFixed(1)}k`;
  if (Math.abs(value) >= 10 || value === 0) return value.toFixed(0);
  return value.toFixed(2);
}
