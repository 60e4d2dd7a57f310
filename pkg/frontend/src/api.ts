/** API client: every number the UI renders comes from these payloads. */

import type {
  Assignment,
  AttentionSlice,
  HistoryRow,
  JobPayload,
  LoadedExample,
  ModelInfo,
  RunRecord,
  ScatterPayload,
} from "./types.js";

export interface SliceRequest {
  assignmentId: string;
  slotId: string;
  modelId: string;
  token: number;
  layer: number;
  head: number;
  mode: "by_layer" | "by_head" | "rug";
}

export interface ApiClient {
  getModels(): Promise<ModelInfo[]>;
  createAssignment(source: string, summaries: Array<{ text: string; options?: object }>): Promise<Assignment>;
  score(assignmentId: string, modelIds: string[]): Promise<RunRecord>;
  perturb(assignmentId: string, slotId: string, modelId: string, method: string): Promise<{ job_id: string }>;
  getJob(jobId: string): Promise<JobPayload>;
  getAttentionSlice(req: SliceRequest): Promise<AttentionSlice>;
  getHistory(slotId: string): Promise<HistoryRow[]>;
  getScatter(xModel: string, yModel: string): Promise<ScatterPayload>;
  loadExample(exampleId: string): Promise<LoadedExample>;
}

export class ApiError extends Error {
  constructor(public status: number, message: string, public detail: unknown) {
    super(message);
  }
}

async function toJson<T>(resp: Response): Promise<T> {
  const body = await resp.json();
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? resp.statusText, body.detail);
  }
  return body as T;
}

/** Talks to the scoring service over its JSON endpoints. */
export class HttpApiClient implements ApiClient {
  constructor(private baseUrl: string = "") {}

  private get<T>(path: string): Promise<T> {
    return fetch(this.baseUrl + path).then((r) => toJson<T>(r));
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    }).then((r) => toJson<T>(r));
  }

  getModels() {
    return this.get<ModelInfo[]>("/api/models");
  }

  createAssignment(source: string, summaries: Array<{ text: string; options?: object }>) {
    return this.post<Assignment>("/api/assignments", { source, summaries });
  }

  score(assignmentId: string, modelIds: string[]) {
    return this.post<RunRecord>("/api/score", {
      assignment_id: assignmentId,
      model_ids: modelIds,
    });
  }

  perturb(assignmentId: string, slotId: string, modelId: string, method: string) {
    return this.post<{ job_id: string }>("/api/perturb", {
      assignment_id: assignmentId,
      slot_id: slotId,
      model_id: modelId,
      method,
    });
  }

  getJob(jobId: string) {
    return this.get<JobPayload>(`/api/jobs/${jobId}`);
  }

  getAttentionSlice(req: SliceRequest) {
    const params = new URLSearchParams({
      token: String(req.token),
      layer: String(req.layer),
      head: String(req.head),
      mode: req.mode,
    });
    return this.get<AttentionSlice>(
      `/api/attention/${req.assignmentId}/${req.slotId}/${req.modelId}?${params}`,
    );
  }

  getHistory(slotId: string) {
    return this.get<HistoryRow[]>(`/api/history?slot=${encodeURIComponent(slotId)}`);
  }

  getScatter(xModel: string, yModel: string) {
    return this.get<ScatterPayload>(
      `/api/training/scatter?x=${encodeURIComponent(xModel)}&y=${encodeURIComponent(yModel)}`,
    );
  }

  loadExample(exampleId: string) {
    return this.post<LoadedExample>(`/api/training/${exampleId}/load`);
  }
}
