/** Wire types mirroring the scoring service's JSON payloads. */

export interface ModelInfo {
  model_id: string;
  kind: string;
  layers: number;
  heads: number;
  embed_dim: number;
  window: number;
  max_len: number;
  global_mode: string;
  score_dimension: string;
}

export interface AnalysisOptions {
  grammar: boolean;
  words: boolean;
  sentences: boolean;
  tokens: boolean;
  attention: boolean;
}

export interface SummarySlot {
  slot_id: string;
  text: string;
  options: AnalysisOptions;
}

export interface Assignment {
  assignment_id: string;
  source: string;
  summaries: SummarySlot[];
}

export interface RunEntry {
  slot_id: string;
  summary_text: string;
  summary_sha256: string;
  model_id: string;
  score: number;
}

export interface RunRecord {
  run_number: number;
  timestamp: number;
  entries: RunEntry[];
}

export interface HistoryRow {
  run_number: number;
  model_id: string;
  score: number;
  summary_text: string;
}

export interface SpanPayload {
  start: number;
  end: number;
  surface: string;
  kind: string;
}

export interface VariantPayload {
  method: string;
  span: SpanPayload | null;
  replacement: string;
  variant_text: string;
  score: number;
  delta: number;
}

export interface PerturbationReport {
  model_id: string;
  method: string;
  baseline_score: number;
  variants: VariantPayload[];
}

export interface JobPayload {
  job_id: string;
  status: "pending" | "running" | "done" | "error";
  report?: PerturbationReport;
  error?: string;
}

/** One heatmap cell: weight / exact zero / masked-out. */
export type CellPayload = { s: "w"; v: number } | { s: "z" } | { s: "m" };

export interface TokenMeta {
  start: number;
  end: number;
  surface: string;
  segment: string;
  global: boolean;
}

export interface AttentionSlice {
  mode: "by_layer" | "by_head" | "rug";
  token: number;
  n: number;
  global_indices: number[];
  cells: CellPayload[][];
  rows: TokenMeta[];
  cols: Array<{ layer?: number; head?: number }>;
}

export interface ScatterPoint {
  example_id?: string;
  slot_id?: string;
  run_number?: number;
  x: number;
  y: number;
}

export interface RunArrow {
  slot_id: string;
  from_run: number;
  to_run: number;
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface HistogramBin {
  lo: number;
  hi: number;
  count: number;
}

export interface ScatterPayload {
  training_points: ScatterPoint[];
  current_points: ScatterPoint[];
  run_arrows: RunArrow[];
  x_hist: HistogramBin[];
  y_hist: HistogramBin[];
}

export interface LoadedExample {
  assignment: Assignment;
  cached_scores: HistoryRow[];
}
