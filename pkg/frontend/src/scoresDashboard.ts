/**
 * Scores Dashboard: run-history table grouped by slot and labeled by run,
 * plus the training-distribution scatter with numbered current dots, dashed
 * provenance arrows, and axis histograms.
 */

import type { HistoryRow, ScatterPayload } from "./types.js";

export const TRAINING_DOT_COLOR = "rgba(70,130,220,0.35)"; // translucent blue
export const CURRENT_DOT_COLOR = "#f2c14e"; // yellow

const PLOT = { width: 420, height: 420, margin: 40, histSize: 60 };

interface Extent {
  min: number;
  max: number;
}

function extent(values: number[]): Extent {
  if (values.length === 0) return { min: -1, max: 1 };
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  return { min, max };
}

function scale(v: number, e: Extent, outLo: number, outHi: number): number {
  return outLo + ((v - e.min) / (e.max - e.min)) * (outHi - outLo);
}

export function renderHistoryTable(rowsBySlot: Map<string, HistoryRow[]>): string {
  const groups: string[] = [];
  for (const [slotId, rows] of rowsBySlot) {
    const body = rows
      .map(
        (r) =>
          `<tr class="history-row" data-run="${r.run_number}">` +
          `<td>run ${r.run_number}</td><td>${r.model_id}</td>` +
          `<td>${r.score.toFixed(4)}</td>` +
          `<td class="summary-snippet" title="${r.summary_text.slice(0, 80)}">` +
          `${r.summary_text.slice(0, 40)}</td></tr>`,
      )
      .join("");
    groups.push(
      `<tbody class="slot-group" data-slot="${slotId}">` +
        `<tr class="slot-header"><th colspan="4">${slotId}</th></tr>${body}</tbody>`,
    );
  }
  return (
    `<table class="history-table">` +
    `<thead><tr><th>run</th><th>model</th><th>score</th><th>summary</th></tr></thead>` +
    groups.join("") +
    `</table>`
  );
}

function renderHistogram(
  bins: ScatterPayload["x_hist"],
  axis: "x" | "y",
  e: Extent,
): string {
  if (bins.length === 0) return `<g class="${axis}-hist"></g>`;
  const maxCount = Math.max(1, ...bins.map((b) => b.count));
  const bars = bins
    .map((b, i) => {
      const span = Math.max(0, maxCount && (b.count / maxCount)) * PLOT.histSize;
      if (axis === "x") {
        const x0 = scale(b.lo, e, PLOT.margin, PLOT.margin + PLOT.width);
        const x1 = scale(b.hi, e, PLOT.margin, PLOT.margin + PLOT.width);
        return (
          `<rect class="hist-bar" data-bin="${i}" data-count="${b.count}" ` +
          `x="${x0.toFixed(1)}" y="${(PLOT.margin + PLOT.height).toFixed(1)}" ` +
          `width="${(x1 - x0).toFixed(1)}" height="${span.toFixed(1)}"/>`
        );
      }
      const y0 = scale(b.hi, e, PLOT.margin + PLOT.height, PLOT.margin);
      const y1 = scale(b.lo, e, PLOT.margin + PLOT.height, PLOT.margin);
      return (
        `<rect class="hist-bar" data-bin="${i}" data-count="${b.count}" ` +
        `x="${(PLOT.margin - span).toFixed(1)}" y="${y0.toFixed(1)}" ` +
        `width="${span.toFixed(1)}" height="${(y1 - y0).toFixed(1)}"/>`
      );
    })
    .join("");
  return `<g class="${axis}-hist">${bars}</g>`;
}

export function renderScatter(payload: ScatterPayload): string {
  const xs = [...payload.training_points, ...payload.current_points].map((p) => p.x);
  const ys = [...payload.training_points, ...payload.current_points].map((p) => p.y);
  const ex = extent(xs);
  const ey = extent(ys);
  const px = (v: number) => scale(v, ex, PLOT.margin, PLOT.margin + PLOT.width);
  const py = (v: number) => scale(v, ey, PLOT.margin + PLOT.height, PLOT.margin);

  const training = payload.training_points
    .map(
      (p) =>
        `<circle class="training-dot" data-example="${p.example_id}" ` +
        `cx="${px(p.x).toFixed(1)}" cy="${py(p.y).toFixed(1)}" r="4" ` +
        `fill="${TRAINING_DOT_COLOR}"><title>${p.example_id}: ` +
        `(${p.x.toFixed(3)}, ${p.y.toFixed(3)})</title></circle>`,
    )
    .join("");

  // Dashed directed arrows between consecutive runs of the same slot.
  const arrows = payload.run_arrows
    .map(
      (a) =>
        `<line class="run-arrow" data-slot="${a.slot_id}" ` +
        `data-from="${a.from_run}" data-to="${a.to_run}" ` +
        `x1="${px(a.x0).toFixed(1)}" y1="${py(a.y0).toFixed(1)}" ` +
        `x2="${px(a.x1).toFixed(1)}" y2="${py(a.y1).toFixed(1)}" ` +
        `stroke-dasharray="5,4" marker-end="url(#arrowhead)"/>`,
    )
    .join("");

  // Current dots carry their run number inside the dot.
  const current = payload.current_points
    .map(
      (p) =>
        `<g class="current-dot" data-slot="${p.slot_id}" data-run="${p.run_number}">` +
        `<circle cx="${px(p.x).toFixed(1)}" cy="${py(p.y).toFixed(1)}" r="9" ` +
        `fill="${CURRENT_DOT_COLOR}"/>` +
        `<text x="${px(p.x).toFixed(1)}" y="${(py(p.y) + 3).toFixed(1)}" ` +
        `text-anchor="middle" class="run-label">${p.run_number}</text></g>`,
    )
    .join("");

  const size = PLOT.margin * 2 + PLOT.width + PLOT.histSize;
  return (
    `<svg class="scatter" viewBox="0 0 ${size} ${size}">` +
    `<defs><marker id="arrowhead" markerWidth="8" markerHeight="8" refX="6" refY="3" orient="auto">` +
    `<path d="M0,0 L6,3 L0,6 z"/></marker></defs>` +
    renderHistogram(payload.x_hist, "x", ex) +
    renderHistogram(payload.y_hist, "y", ey) +
    `<g class="training-layer">${training}</g>` +
    `<g class="arrow-layer">${arrows}</g>` +
    `<g class="current-layer">${current}</g>` +
    `</svg>`
  );
}

export function renderScoresDashboard(
  history: Map<string, HistoryRow[]>,
  scatter: ScatterPayload,
): string {
  return (
    `<section class="scores-dashboard">` +
    renderHistoryTable(history) +
    renderScatter(scatter) +
    `</section>`
  );
}
