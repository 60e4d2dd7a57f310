"""Command-line interface.

Subcommands: serve, score, perturb, attention, ingest-training,
derive-scores.  Exit codes: 0 success, 1 engine error, 2 usage error.
With --json, machine-readable JSON goes to standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from .assignments import Assignment, SummarySlot
from .provenance import TrainingStore, derive_component_scores
from .service import ServiceConfig, Workbench


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(payload, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload))
    else:
        print(json.dumps(payload, indent=2))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scorelens")
    parser.add_argument("--config", help="service config JSON path")
    parser.add_argument("--json", action="store_true", help="compact JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)

    score = sub.add_parser("score", help="score a source/summary pair")
    score.add_argument("--source", required=True, help="source text file")
    score.add_argument("--summary", required=True, help="summary text file")
    score.add_argument("--model", required=True)
    score.add_argument("--models", help="model registry JSON path")

    perturb = sub.add_parser("perturb", help="run a perturbation analysis")
    perturb.add_argument("--source", required=True)
    perturb.add_argument("--summary", required=True)
    perturb.add_argument("--model", required=True)
    perturb.add_argument("--method", required=True,
                         choices=["words", "sentences", "tokens", "grammar"])
    perturb.add_argument("--models")

    attention = sub.add_parser("attention", help="slice an attention tensor")
    attention.add_argument("--source", required=True)
    attention.add_argument("--summary", required=True)
    attention.add_argument("--model", required=True)
    attention.add_argument("--token", type=int, default=0)
    attention.add_argument("--layer", type=int, default=0)
    attention.add_argument("--head", type=int, default=0)
    attention.add_argument("--mode", default="by_layer",
                           choices=["by_layer", "by_head", "rug"])
    attention.add_argument("--models")

    ingest = sub.add_parser("ingest-training", help="ingest a training corpus")
    ingest.add_argument("--path", required=True)

    derive = sub.add_parser("derive-scores",
                            help="derive Content/Wording from a rubric matrix")
    derive.add_argument("--rubric", required=True,
                        help="JSON file: array of six-value rubric rows")

    return parser


def _workbench(args) -> Workbench:
    config = ServiceConfig.resolve(args.config)
    if getattr(args, "models", None):
        config.models_path = args.models
    return Workbench(config)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "serve":
            import uvicorn

            from .service import create_app

            config = ServiceConfig.resolve(args.config)
            if args.host:
                config.host = args.host
            if args.port:
                config.port = args.port
            uvicorn.run(create_app(config), host=config.host, port=config.port)
            return 0

        if args.command == "score":
            wb = _workbench(args)
            result = wb.registry.score_pair(
                args.model, _read(args.source), _read(args.summary)
            )
            _emit(result.to_payload(include_attention=False), args.json)
            return 0

        if args.command == "perturb":
            wb = _workbench(args)
            assignment = Assignment(
                assignment_id="cli",
                source=_read(args.source),
                slots=[SummarySlot(slot_id="cli", text=_read(args.summary))],
            )
            _emit(wb.perturb(assignment, "cli", args.model, args.method), args.json)
            return 0

        if args.command == "attention":
            wb = _workbench(args)
            payload = wb.attention_slice(
                args.model, _read(args.source), _read(args.summary),
                args.token, args.mode, args.layer, args.head,
            )
            _emit(payload, args.json)
            return 0

        if args.command == "ingest-training":
            store = TrainingStore()
            report = store.ingest(args.path)
            _emit(
                {
                    "accepted": report.accepted,
                    "rejected": [
                        {"line": line, "reason": reason}
                        for line, reason in report.rejected
                    ],
                },
                args.json,
            )
            return 0

        if args.command == "derive-scores":
            with open(args.rubric, "r", encoding="utf-8") as fh:
                matrix = np.asarray(json.load(fh), dtype=float)
            content, wording = derive_component_scores(matrix)
            _emit({"content": content.tolist(), "wording": wording.tolist()}, args.json)
            return 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    parser.error(f"unknown command: {args.command}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
