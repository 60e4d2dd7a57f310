/** Serializable view state: selections, sliders, ramp, expanded words. */

import type { Ramp } from "./colorRamp.js";

export interface ViewState {
  assignmentId: string | null;
  slotId: string | null;
  modelId: string | null;
  method: string;
  tokenIndex: number;
  layer: number;
  head: number;
  ramp: Ramp;
  expandedWords: string[];
}

export function defaultViewState(): ViewState {
  return {
    assignmentId: null,
    slotId: null,
    modelId: null,
    method: "words",
    tokenIndex: 0,
    layer: 0,
    head: 0,
    ramp: "diverging_red_blue",
    expandedWords: [],
  };
}

/** Encode into a URL fragment so a reload restores an identical render. */
export function serializeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.assignmentId) params.set("a", state.assignmentId);
  if (state.slotId) params.set("s", state.slotId);
  if (state.modelId) params.set("m", state.modelId);
  params.set("method", state.method);
  params.set("t", String(state.tokenIndex));
  params.set("l", String(state.layer));
  params.set("h", String(state.head));
  params.set("ramp", state.ramp);
  if (state.expandedWords.length > 0) params.set("x", state.expandedWords.join(","));
  return "#" + params.toString();
}

export function deserializeViewState(fragment: string): ViewState {
  const params = new URLSearchParams(fragment.replace(/^#/, ""));
  const state = defaultViewState();
  state.assignmentId = params.get("a");
  state.slotId = params.get("s");
  state.modelId = params.get("m");
  state.method = params.get("method") ?? state.method;
  state.tokenIndex = Number(params.get("t") ?? 0);
  state.layer = Number(params.get("l") ?? 0);
  state.head = Number(params.get("h") ?? 0);
  const ramp = params.get("ramp");
  if (ramp === "diverging_red_blue" || ramp === "linear_purple") state.ramp = ramp;
  const expanded = params.get("x");
  state.expandedWords = expanded ? expanded.split(",") : [];
  return state;
}
