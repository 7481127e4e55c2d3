// Hand-rolled SVG charts built from raw series in the analysis result; no
// chart library, no server-side rendering. Hover titles give the exact
// values, and everything scales from the data alone.

import { escapeHtml } from "./report";

export interface ChartPoint {
  label: string;
  value: number;
}

const WIDTH = 640;
const HEIGHT = 240;
const PAD = { top: 12, right: 12, bottom: 48, left: 44 };

function plotArea() {
  return {
    w: WIDTH - PAD.left - PAD.right,
    h: HEIGHT - PAD.top - PAD.bottom,
  };
}

function axis(maxValue: number): string {
  const { h } = plotArea();
  const lines: string[] = [];
  for (const fraction of [0, 0.5, 1]) {
    const y = PAD.top + h - h * fraction;
    const value = Math.round(maxValue * fraction * 100) / 100;
    lines.push(
      `<line x1="${PAD.left}" y1="${y}" x2="${WIDTH - PAD.right}" y2="${y}" class="grid"/>`,
      `<text x="${PAD.left - 6}" y="${y + 4}" class="tick" text-anchor="end">${value}</text>`,
    );
  }
  return lines.join("");
}

export function barChart(points: ChartPoint[], cssClass = "bar"): string {
  if (points.length === 0) return `<p class="empty">no data</p>`;
  const { w, h } = plotArea();
  const maxValue = Math.max(...points.map((p) => p.value), 1);
  const step = w / points.length;
  const barWidth = Math.max(4, step * 0.6);
  const bars = points
    .map((point, i) => {
      const barHeight = (point.value / maxValue) * h;
      const x = PAD.left + i * step + (step - barWidth) / 2;
      const y = PAD.top + h - barHeight;
      const label = escapeHtml(point.label);
      return (
        `<rect class="${cssClass}" x="${x.toFixed(1)}" y="${y.toFixed(1)}"` +
        ` width="${barWidth.toFixed(1)}" height="${barHeight.toFixed(1)}">` +
        `<title>${label}: ${point.value}</title></rect>` +
        `<text x="${(x + barWidth / 2).toFixed(1)}" y="${HEIGHT - PAD.bottom + 16}"` +
        ` class="tick" text-anchor="middle">${label}</text>`
      );
    })
    .join("");
  return svg(`${axis(maxValue)}${bars}`);
}

export function lineChart(points: ChartPoint[]): string {
  if (points.length === 0) return `<p class="empty">no data</p>`;
  const { w, h } = plotArea();
  const maxValue = Math.max(...points.map((p) => p.value), 1);
  const step = points.length > 1 ? w / (points.length - 1) : 0;
  const coords = points.map((point, i) => {
    const x = PAD.left + (points.length > 1 ? i * step : w / 2);
    const y = PAD.top + h - (point.value / maxValue) * h;
    return { x, y, point };
  });
  const path = coords
    .map((c, i) => `${i === 0 ? "M" : "L"}${c.x.toFixed(1)},${c.y.toFixed(1)}`)
    .join(" ");
  const markers = coords
    .map(
      (c) =>
        `<circle cx="${c.x.toFixed(1)}" cy="${c.y.toFixed(1)}" r="3" class="dot">` +
        `<title>${escapeHtml(c.point.label)}: ${c.point.value}</title></circle>`,
    )
    .join("");
  const labelEvery = Math.max(1, Math.ceil(points.length / 8));
  const labels = coords
    .filter((_, i) => i % labelEvery === 0)
    .map(
      (c) =>
        `<text x="${c.x.toFixed(1)}" y="${HEIGHT - PAD.bottom + 16}" class="tick"` +
        ` text-anchor="middle">${escapeHtml(c.point.label.slice(5))}</text>`,
    )
    .join("");
  return svg(`${axis(maxValue)}<path d="${path}" class="line"/>${markers}${labels}`);
}

function svg(content: string): string {
  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" class="chart"` +
    ` xmlns="http://www.w3.org/2000/svg">${content}</svg>`
  );
}
