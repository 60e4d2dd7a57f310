/**
 * Assignments Panel: model multi-select, summary text boxes with add/remove,
 * per-summary analysis checkboxes, example list, and the score button.
 */

import type { ApiClient } from "./api.js";
import type { Assignment, ModelInfo, RunRecord } from "./types.js";

const ANALYSIS_OPTIONS = ["grammar", "words", "sentences", "tokens", "attention"] as const;

export interface PanelState {
  source: string;
  summaries: Array<{ text: string; options: Record<string, boolean> }>;
  selectedModels: string[];
}

export function emptyPanelState(): PanelState {
  return { source: "", summaries: [{ text: "", options: {} }], selectedModels: [] };
}

export function addSummaryBox(state: PanelState): PanelState {
  return { ...state, summaries: [...state.summaries, { text: "", options: {} }] };
}

export function removeSummaryBox(state: PanelState, index: number): PanelState {
  if (state.summaries.length <= 1) return state;
  return { ...state, summaries: state.summaries.filter((_, i) => i !== index) };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderAssignmentsPanel(
  state: PanelState,
  models: ModelInfo[],
  exampleIds: string[] = [],
): string {
  const modelOptions = models
    .map(
      (m) =>
        `<option value="${m.model_id}"` +
        (state.selectedModels.includes(m.model_id) ? " selected" : "") +
        `>${m.model_id} (${m.score_dimension || m.kind})</option>`,
    )
    .join("");
  const boxes = state.summaries
    .map((s, i) => {
      const checks = ANALYSIS_OPTIONS.map(
        (opt) =>
          `<label><input type="checkbox" class="opt" data-slot="${i}" data-option="${opt}"` +
          (s.options[opt] ? " checked" : "") +
          `>${opt}</label>`,
      ).join(" ");
      return (
        `<div class="summary-box" data-index="${i}">` +
        `<textarea class="summary-text">${escapeHtml(s.text)}</textarea>` +
        `<div class="analysis-options">${checks}</div>` +
        `<button class="remove-summary" data-index="${i}">remove</button>` +
        `</div>`
      );
    })
    .join("");
  const examples = exampleIds
    .map((id) => `<li class="example-pair" data-example="${id}">${id}</li>`)
    .join("");
  return (
    `<section class="assignments-panel">` +
    `<select class="model-select" multiple>${modelOptions}</select>` +
    `<textarea class="source-text">${escapeHtml(state.source)}</textarea>` +
    boxes +
    `<button class="add-summary">add summary</button>` +
    `<ul class="example-list">${examples}</ul>` +
    `<button class="score-button">score</button>` +
    `</section>`
  );
}

/** The score button: create the assignment, then POST /api/score. */
export async function submitScore(
  client: ApiClient,
  state: PanelState,
): Promise<{ assignment: Assignment; record: RunRecord }> {
  const assignment = await client.createAssignment(
    state.source,
    state.summaries.map((s) => ({ text: s.text, options: s.options })),
  );
  const record = await client.score(assignment.assignment_id, state.selectedModels);
  return { assignment, record };
}
