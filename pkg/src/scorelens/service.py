"""HTTP service binding the engine modules into the workbench backend.

All responses are JSON; client errors map to 4xx with
``{"error": message, "detail": {...}}`` and engine failures to 5xx.
Perturbation runs as background jobs polled via ``/api/jobs/{id}``;
attention tensors are recomputed on demand behind a small LRU cache.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Tuple

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .assignments import Assignment, new_assignment
from .attention import AttentionTensor, slice_attention
from .perturbation import (
    METHODS,
    load_lexicon,
    load_stopwords,
    run_perturbation,
)
from .provenance import (
    EventLog,
    TrainingStore,
    load_example,
    example_slot_id,
    scatter_payload,
)
from .scoring import (
    ModelNotFoundError,
    ModelRegistry,
    SummaryTooLongError,
)
from .spelling import FrequencyDictionary

CONFIG_ENV_VAR = "SCORELENS_CONFIG"
ATTENTION_CACHE_SIZE = 8


class ApiError(Exception):
    def __init__(self, status: int, message: str, detail: Optional[dict] = None):
        super().__init__(message)
        self.status = status
        self.message = message
        self.detail = detail or {}


def _packaged(name: str) -> str:
    with resources.as_file(resources.files("scorelens.data").joinpath(name)) as p:
        return str(p)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8040
    models_path: str = field(default_factory=lambda: _packaged("models.json"))
    lexicon_path: str = field(default_factory=lambda: _packaged("lexicon.tsv"))
    dictionary_path: str = field(default_factory=lambda: _packaged("frequency_dictionary.txt"))
    stopwords_path: str = field(default_factory=lambda: _packaged("stopwords.txt"))
    training_path: str = field(default_factory=lambda: _packaged("training_corpus.jsonl"))
    event_log_path: str = "scorelens-events.ldjson"
    external_timeout: float = 60.0
    workers: int = 4

    def __post_init__(self):
        if not (1 <= self.port <= 65535):
            raise ValueError("port must be in [1, 65535]")
        for attr in ("models_path", "lexicon_path", "dictionary_path",
                     "stopwords_path", "training_path"):
            path = getattr(self, attr)
            if not os.path.exists(path):
                raise FileNotFoundError(f"{attr} not readable: {path}")

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(**json.load(fh))

    @classmethod
    def resolve(cls, path: Optional[str] = None) -> "ServiceConfig":
        path = path or os.environ.get(CONFIG_ENV_VAR)
        return cls.from_file(path) if path else cls()


class AttentionCache:
    """LRU cache of attention tensors keyed by (model_id, pair hash)."""

    def __init__(self, capacity: int = ATTENTION_CACHE_SIZE):
        self.capacity = capacity
        self._items: "OrderedDict[Tuple[str, str], AttentionTensor]" = OrderedDict()
        self._lock = threading.Lock()

    @staticmethod
    def key(model_id: str, source: str, summary: str) -> Tuple[str, str]:
        digest = hashlib.sha256()
        digest.update(source.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(summary.encode("utf-8"))
        return (model_id, digest.hexdigest())

    def get(self, key):
        with self._lock:
            if key in self._items:
                self._items.move_to_end(key)
                return self._items[key]
        return None

    def put(self, key, tensor) -> None:
        with self._lock:
            self._items[key] = tensor
            self._items.move_to_end(key)
            while len(self._items) > self.capacity:
                self._items.popitem(last=False)


class Workbench:
    """Shared engine state behind the API and the CLI."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.registry = ModelRegistry.from_file(
            config.models_path, timeout=config.external_timeout
        )
        self.lexicon = load_lexicon(config.lexicon_path)
        self.stopwords = load_stopwords(config.stopwords_path)
        self.dictionary = FrequencyDictionary.from_file(config.dictionary_path)
        self.training = TrainingStore()
        self.training.ingest(config.training_path)
        self.log = EventLog(config.event_log_path)
        self.assignments: Dict[str, Assignment] = {}
        self.jobs: Dict[str, dict] = {}
        self.attention_cache = AttentionCache()
        self.executor = ThreadPoolExecutor(max_workers=config.workers)
        self._lock = threading.Lock()

    # -- engine compositions shared by API and CLI -------------------------

    def score_assignment(self, assignment: Assignment, model_ids: List[str]) -> dict:
        scores = []
        for slot in assignment.slots:
            for model_id in model_ids:
                result = self.registry.score_pair(model_id, assignment.source, slot.text)
                scores.append((slot.slot_id, model_id, result.score))
        record = self.log.record_run(assignment, scores)
        return record.to_payload()

    def perturb(self, assignment: Assignment, slot_id: str, model_id: str, method: str) -> dict:
        report = run_perturbation(
            assignment.source,
            assignment.slot(slot_id).text,
            model_id,
            method,
            self.registry,
            lexicon=self.lexicon,
            dictionary=self.dictionary,
            stopwords=self.stopwords,
        )
        return report.to_payload()

    def attention_tensor(self, model_id: str, source: str, summary: str):
        key = AttentionCache.key(model_id, source, summary)
        cached = self.attention_cache.get(key)
        if cached is not None:
            return cached
        result = self.registry.score_pair(model_id, source, summary, want_attention=True)
        if result.attention is None:
            raise ApiError(502, "model did not return attention",
                           {"model_id": model_id})
        pair = (result.attention, result.model_input)
        self.attention_cache.put(key, pair)
        return pair

    def attention_slice(
        self, model_id: str, source: str, summary: str,
        token: int, mode: str, layer: int, head: int,
    ) -> dict:
        tensor, model_input = self.attention_tensor(model_id, source, summary)
        cells = slice_attention(tensor, token, mode, layer=layer, head=head)
        if mode == "rug":
            cell_rows = [[c.to_payload() for c in cells]]
            cols = [{"layer": layer, "head": head}]
        else:
            cell_rows = [[c.to_payload() for c in row] for row in cells]
            cols = (
                [{"layer": l} for l in range(tensor.layers)]
                if mode == "by_layer"
                else [{"head": h} for h in range(tensor.heads)]
            )
        rows = model_input.token_payload() if model_input is not None else []
        return {
            "mode": mode,
            "token": token,
            "n": tensor.n,
            "global_indices": list(tensor.global_indices),
            "cells": cell_rows,
            "rows": rows,
            "cols": cols,
        }


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    wb = Workbench(config or ServiceConfig())
    app = FastAPI(title="scorelens", version="0.1.0")
    app.state.workbench = wb

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": exc.message, "detail": exc.detail},
        )

    def _assignment(assignment_id: str) -> Assignment:
        try:
            return wb.assignments[assignment_id]
        except KeyError:
            raise ApiError(404, "assignment not found", {"assignment_id": assignment_id})

    def _model(model_id: str):
        try:
            return wb.registry.get(model_id)
        except ModelNotFoundError:
            raise ApiError(404, "model not found", {"model_id": model_id})

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "request body must be JSON", {"field": "<body>"})
        if not isinstance(body, dict):
            raise ApiError(400, "request body must be a JSON object", {"field": "<body>"})
        return body

    @app.get("/api/models")
    async def get_models():
        out = []
        for cfg in wb.registry.configs():
            out.append(
                {
                    "model_id": cfg.model_id,
                    "kind": cfg.kind,
                    "layers": cfg.layers,
                    "heads": cfg.heads,
                    "embed_dim": cfg.embed_dim,
                    "window": cfg.window,
                    "max_len": cfg.max_len,
                    "global_mode": cfg.global_mode,
                    "score_dimension": cfg.score_dimension,
                }
            )
        return out

    @app.post("/api/assignments")
    async def post_assignment(request: Request):
        body = await _json_body(request)
        source = body.get("source")
        summaries = body.get("summaries")
        if not isinstance(source, str) or not source:
            raise ApiError(400, "source must be a non-empty string", {"field": "source"})
        if not isinstance(summaries, list) or not summaries:
            raise ApiError(400, "summaries must be non-empty", {"field": "summaries"})
        for i, item in enumerate(summaries):
            if not isinstance(item, dict) or not isinstance(item.get("text"), str):
                raise ApiError(400, "each summary needs a text field",
                               {"field": f"summaries[{i}].text"})
        assignment = new_assignment(source, summaries)
        wb.assignments[assignment.assignment_id] = assignment
        return assignment.to_payload()

    @app.post("/api/score")
    async def post_score(request: Request):
        body = await _json_body(request)
        assignment = _assignment(str(body.get("assignment_id", "")))
        model_ids = body.get("model_ids")
        if not isinstance(model_ids, list) or not model_ids:
            raise ApiError(400, "model_ids must be non-empty", {"field": "model_ids"})
        for mid in model_ids:
            _model(mid)
        try:
            return wb.score_assignment(assignment, model_ids)
        except SummaryTooLongError as exc:
            raise ApiError(400, str(exc), {"field": "summaries"})

    @app.post("/api/perturb")
    async def post_perturb(request: Request):
        body = await _json_body(request)
        assignment = _assignment(str(body.get("assignment_id", "")))
        slot_id = str(body.get("slot_id", ""))
        model_id = str(body.get("model_id", ""))
        method = str(body.get("method", ""))
        _model(model_id)
        try:
            assignment.slot(slot_id)
        except KeyError:
            raise ApiError(404, "slot not found", {"slot_id": slot_id})
        if method not in METHODS:
            raise ApiError(400, f"unknown method: {method}", {"field": "method"})
        job_id = uuid.uuid4().hex[:12]
        wb.jobs[job_id] = {"status": "pending", "report": None, "error": None}

        def _run():
            wb.jobs[job_id]["status"] = "running"
            try:
                report = wb.perturb(assignment, slot_id, model_id, method)
            except Exception as exc:  # job failure surfaces via polling
                wb.jobs[job_id].update(status="error", error=str(exc))
                return
            wb.jobs[job_id].update(status="done", report=report)

        wb.executor.submit(_run)
        return {"job_id": job_id}

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        job = wb.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "job not found", {"job_id": job_id})
        payload = {"job_id": job_id, "status": job["status"]}
        if job["status"] == "done":
            payload["report"] = job["report"]
        if job["status"] == "error":
            payload["error"] = job["error"]
        return payload

    @app.get("/api/attention/{assignment_id}/{slot_id}/{model_id}")
    async def get_attention(
        assignment_id: str,
        slot_id: str,
        model_id: str,
        token: int = 0,
        layer: int = 0,
        head: int = 0,
        mode: str = "by_layer",
    ):
        assignment = _assignment(assignment_id)
        _model(model_id)
        try:
            slot = assignment.slot(slot_id)
        except KeyError:
            raise ApiError(404, "slot not found", {"slot_id": slot_id})
        if mode not in ("by_layer", "by_head", "rug"):
            raise ApiError(400, f"unknown mode: {mode}", {"field": "mode"})
        try:
            return wb.attention_slice(
                model_id, assignment.source, slot.text, token, mode, layer, head
            )
        except IndexError as exc:
            raise ApiError(400, str(exc), {"field": "token/layer/head"})

    @app.get("/api/history")
    async def get_history(slot: str = ""):
        return wb.log.get_history(slot)

    @app.get("/api/training/scatter")
    async def get_scatter(x: str = "content", y: str = "wording"):
        _model(x)
        _model(y)
        x_dim = wb.registry.get(x).score_dimension or "content"
        y_dim = wb.registry.get(y).score_dimension or "wording"
        return scatter_payload(wb.training, wb.log, x, y, x_dim, y_dim)

    @app.post("/api/training/{example_id}/load")
    async def post_load_example(example_id: str):
        try:
            assignment = load_example(wb.training, example_id)
        except KeyError:
            raise ApiError(404, "training example not found", {"example_id": example_id})
        wb.assignments[assignment.assignment_id] = assignment
        return {
            "assignment": assignment.to_payload(),
            "cached_scores": wb.log.get_history(example_slot_id(example_id)),
        }

    return app
