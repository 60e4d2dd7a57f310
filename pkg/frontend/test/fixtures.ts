/** Recorded service payloads plus a fixture-backed ApiClient for tests. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { ApiClient, SliceRequest } from "../src/api.js";
import type {
  Assignment,
  AttentionSlice,
  HistoryRow,
  JobPayload,
  LoadedExample,
  ModelInfo,
  PerturbationReport,
  RunRecord,
  ScatterPayload,
} from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(HERE, "fixtures", `${name}.json`), "utf8")) as T;
}

export const MODELS = loadFixture<ModelInfo[]>("models");
export const ASSIGNMENT = loadFixture<Assignment>("assignment");
export const RUN_RECORD = loadFixture<RunRecord>("run_record");
export const PERTURB_WORDS = loadFixture<PerturbationReport>("perturb_words");
export const PERTURB_SENTENCES = loadFixture<PerturbationReport>("perturb_sentences");
export const PERTURB_GRAMMAR = loadFixture<PerturbationReport>("perturb_grammar");
export const ATTENTION_BY_LAYER = loadFixture<AttentionSlice>("attention_by_layer");
export const ATTENTION_BY_HEAD = loadFixture<AttentionSlice>("attention_by_head");
export const ATTENTION_RUG = loadFixture<AttentionSlice>("attention_rug");
export const HISTORY = loadFixture<HistoryRow[]>("history");
export const SCATTER = loadFixture<ScatterPayload>("scatter");
export const LOAD_EXAMPLE = loadFixture<LoadedExample>("load_example");

/** Serves the recorded payloads and records every slice request it sees. */
export class FixtureApiClient implements ApiClient {
  sliceRequests: SliceRequest[] = [];
  assignmentCalls = 0;
  scoreCalls = 0;

  async getModels(): Promise<ModelInfo[]> {
    return MODELS;
  }

  async createAssignment(): Promise<Assignment> {
    this.assignmentCalls += 1;
    return ASSIGNMENT;
  }

  async score(): Promise<RunRecord> {
    this.scoreCalls += 1;
    return RUN_RECORD;
  }

  async perturb(): Promise<{ job_id: string }> {
    return { job_id: "job-fixture" };
  }

  async getJob(): Promise<JobPayload> {
    return { job_id: "job-fixture", status: "done", report: PERTURB_WORDS };
  }

  async getAttentionSlice(req: SliceRequest): Promise<AttentionSlice> {
    this.sliceRequests.push(req);
    if (req.mode === "by_layer") return ATTENTION_BY_LAYER;
    if (req.mode === "by_head") return ATTENTION_BY_HEAD;
    return ATTENTION_RUG;
  }

  async getHistory(): Promise<HistoryRow[]> {
    return HISTORY;
  }

  async getScatter(): Promise<ScatterPayload> {
    return SCATTER;
  }

  async loadExample(): Promise<LoadedExample> {
    return LOAD_EXAMPLE;
  }
}
