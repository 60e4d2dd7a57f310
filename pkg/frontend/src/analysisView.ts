/**
 * Model Analysis View: perturbation renderings (words with click-to-expand
 * synonym lists, sentence/token underlines, grammar variants side by side)
 * and the token-attention view with coupled layer/head heatmaps and rug.
 */

import type { ApiClient } from "./api.js";
import { rampColor, type Ramp } from "./colorRamp.js";
import type {
  AttentionSlice,
  CellPayload,
  PerturbationReport,
  TokenMeta,
} from "./types.js";
import { domainMax, groupBySpan, underlineStyle, wordUnderlineValue } from "./underline.js";
import type { ViewState } from "./viewState.js";

export const ZERO_CELL_COLOR = "#ff1f1f"; // bright red: zero, not missing
export const SELECTED_TOKEN_STROKE = "red";
export const GLOBAL_TOKEN_STROKE = "goldenrod";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// ---------------------------------------------------------------------------
// Perturbation renderings
// ---------------------------------------------------------------------------

export function renderWordsView(
  report: PerturbationReport,
  summary: string,
  ramp: Ramp,
  expandedWords: Set<string>,
): string {
  const max = domainMax(report);
  const groups = groupBySpan(report);
  const encoder = new TextEncoder();
  const raw = encoder.encode(summary);
  const decoder = new TextDecoder();

  let html = "";
  let cursor = 0;
  const ordered = [...groups.entries()].sort(
    (a, b) => Number(a[0].split(":")[0]) - Number(b[0].split(":")[0]),
  );
  for (const [key, variants] of ordered) {
    const span = variants[0].span!;
    html += escapeHtml(decoder.decode(raw.slice(cursor, span.start)));
    const deltas = variants.map((v) => v.delta);
    const underline = wordUnderlineValue(deltas);
    const expanded = expandedWords.has(key);
    // Replaced word: struck through with an ellipsis, underline colored by
    // the max-signed-magnitude delta; click expands the synonym list.
    const synonyms = variants
      .map(
        (v) =>
          `<li class="synonym" style="${underlineStyle(v.delta, ramp, max)}">` +
          `${escapeHtml(v.replacement)} (${v.delta >= 0 ? "+" : ""}${v.delta.toFixed(4)})</li>`,
      )
      .join("");
    html +=
      `<span class="replaced-word" data-span="${key}" ` +
      `style="${underlineStyle(underline, ramp, max)}">` +
      `<s>${escapeHtml(span.surface)}</s>&hellip;` +
      (expanded ? `<ul class="synonym-list">${synonyms}</ul>` : "") +
      `</span>`;
    cursor = span.end;
  }
  html += escapeHtml(decoder.decode(raw.slice(cursor)));
  return `<div class="words-view">${html}</div>`;
}

export function renderSpanUnderlines(
  report: PerturbationReport,
  summary: string,
  ramp: Ramp,
): string {
  const max = domainMax(report);
  const encoder = new TextEncoder();
  const raw = encoder.encode(summary);
  const decoder = new TextDecoder();
  let html = "";
  let cursor = 0;
  for (const v of report.variants) {
    if (v.span === null || v.span.start < cursor) continue;
    html += escapeHtml(decoder.decode(raw.slice(cursor, v.span.start)));
    html +=
      `<span class="perturbed-span" data-method="${report.method}" ` +
      `title="delta ${v.delta.toFixed(4)}" ` +
      `style="${underlineStyle(v.delta, ramp, max)}">` +
      `${escapeHtml(v.span.surface)}</span>`;
    cursor = v.span.end;
  }
  html += escapeHtml(decoder.decode(raw.slice(cursor)));
  return `<div class="${report.method}-view">${html}</div>`;
}

export function renderGrammarView(report: PerturbationReport, ramp: Ramp): string {
  const max = domainMax(report);
  const panes = report.variants
    .map(
      (v) =>
        `<div class="grammar-variant" data-mode="${v.replacement}">` +
        `<h4>${v.replacement}</h4>` +
        `<p style="${underlineStyle(v.delta, ramp, max)}">` +
        `${escapeHtml(v.variant_text)}</p>` +
        `<span class="delta">${v.delta >= 0 ? "+" : ""}${v.delta.toFixed(4)}</span>` +
        `</div>`,
    )
    .join("");
  return `<div class="grammar-view">${panes}</div>`;
}

// ---------------------------------------------------------------------------
// Token attention view
// ---------------------------------------------------------------------------

function cellColor(cell: CellPayload, maxWeight: number): string | null {
  if (cell.s === "m") return null; // missing cells stay unpainted
  if (cell.s === "z") return ZERO_CELL_COLOR;
  const t = maxWeight > 0 ? cell.v / maxWeight : 0;
  return rampColor(t, "linear_purple", 1);
}

function renderCellGrid(slice: AttentionSlice, cls: string): string {
  let maxWeight = 0;
  for (const row of slice.cells) {
    for (const c of row) {
      if (c.s === "w" && c.v > maxWeight) maxWeight = c.v;
    }
  }
  const rows = slice.cells
    .map((row, k) => {
      const cells = row
        .map((c, j) => {
          const color = cellColor(c, maxWeight);
          const title =
            c.s === "w" ? `${slice.rows[k]?.surface ?? ""}: ${c.v}` :
            c.s === "z" ? `${slice.rows[k]?.surface ?? ""}: zero` : "";
          return color === null
            ? `<td class="cell missing" data-k="${k}" data-j="${j}"></td>`
            : `<td class="cell" data-k="${k}" data-j="${j}" ` +
              `style="background:${color}" title="${title}"></td>`;
        })
        .join("");
      return `<tr>${cells}</tr>`;
    })
    .join("");
  return `<table class="${cls}">${rows}</table>`;
}

export function renderRug(slice: AttentionSlice): string {
  const strip = slice.cells[0]
    .map((c, k) => {
      const color = cellColor(c, 1);
      return color === null
        ? `<span class="rug-cell missing" data-k="${k}"></span>`
        : `<span class="rug-cell" data-k="${k}" style="background:${color}"></span>`;
    })
    .join("");
  return `<div class="rug-plot">${strip}</div>`;
}

export function renderTokenText(
  tokens: TokenMeta[],
  selected: number,
  globals: number[],
): string {
  const globalSet = new Set(globals);
  return (
    `<div class="token-text">` +
    tokens
      .map((t, i) => {
        const strokes: string[] = [];
        if (i === selected) strokes.push(`outline: 2px solid ${SELECTED_TOKEN_STROKE}`);
        if (globalSet.has(i)) strokes.push(`box-shadow: 0 0 0 2px ${GLOBAL_TOKEN_STROKE}`);
        return (
          `<span class="token" data-index="${i}"` +
          (strokes.length ? ` style="${strokes.join("; ")}"` : "") +
          `>${escapeHtml(t.surface || "·")}</span>`
        );
      })
      .join(" ") +
    `</div>`
  );
}

export interface TokenSelection {
  byLayer: AttentionSlice;
  byHead: AttentionSlice;
  rug: AttentionSlice;
}

/**
 * Token click: fetch the by_layer, by_head, and rug slices for the selected
 * token (exactly three fetches) and return the data for re-render.
 */
export async function selectToken(
  client: ApiClient,
  state: ViewState,
  tokenIndex: number,
): Promise<TokenSelection> {
  if (!state.assignmentId || !state.slotId || !state.modelId) {
    throw new Error("no assignment/slot/model selected");
  }
  const base = {
    assignmentId: state.assignmentId,
    slotId: state.slotId,
    modelId: state.modelId,
    token: tokenIndex,
    layer: state.layer,
    head: state.head,
  };
  const [byLayer, byHead, rug] = await Promise.all([
    client.getAttentionSlice({ ...base, mode: "by_layer" }),
    client.getAttentionSlice({ ...base, mode: "by_head" }),
    client.getAttentionSlice({ ...base, mode: "rug" }),
  ]);
  state.tokenIndex = tokenIndex;
  return { byLayer, byHead, rug };
}

/**
 * Coupled sliders: dragging the layer slider only refetches the by_head
 * slice at the new layer (the by_layer heatmap is layer-independent), and
 * symmetrically for the head slider.
 */
export async function moveLayerSlider(
  client: ApiClient,
  state: ViewState,
  layer: number,
): Promise<AttentionSlice> {
  state.layer = layer;
  return client.getAttentionSlice({
    assignmentId: state.assignmentId!,
    slotId: state.slotId!,
    modelId: state.modelId!,
    token: state.tokenIndex,
    layer,
    head: state.head,
    mode: "by_head",
  });
}

export async function moveHeadSlider(
  client: ApiClient,
  state: ViewState,
  head: number,
): Promise<AttentionSlice> {
  state.head = head;
  return client.getAttentionSlice({
    assignmentId: state.assignmentId!,
    slotId: state.slotId!,
    modelId: state.modelId!,
    token: state.tokenIndex,
    layer: state.layer,
    head,
    mode: "by_layer",
  });
}

export function renderAnalysisView(selection: TokenSelection, state: ViewState): string {
  return (
    `<section class="analysis-view">` +
    renderTokenText(
      selection.rug.rows,
      state.tokenIndex,
      selection.rug.global_indices,
    ) +
    renderCellGrid(selection.byLayer, "heatmap by-layer") +
    renderCellGrid(selection.byHead, "heatmap by-head") +
    renderRug(selection.rug) +
    `</section>`
  );
}
