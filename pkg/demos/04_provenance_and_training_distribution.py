"""Track score provenance across revisions and place runs in the training
distribution.

Scores three revisions of a summary, shows the numbered run history and the
scatter payload (training cloud, current points, provenance arrows, axis
histograms), and re-derives Content/Wording targets from a rubric matrix.
"""

import tempfile
from pathlib import Path

import numpy as np

from scorelens import (
    Assignment,
    EventLog,
    ModelConfig,
    ModelRegistry,
    SummarySlot,
    TrainingStore,
    derive_component_scores,
    scatter_payload,
)
from importlib import resources as ir

SOURCE = (
    "Objects stay at rest or keep moving unless a force acts on them. A "
    "heavier object needs a larger force to change its motion."
)
REVISIONS = [
    "Things move.",
    "Things keep moving unless a force stops them.",
    "Objects keep their motion unless a force acts, and heavier objects need more force.",
]

registry = ModelRegistry([
    ModelConfig(model_id="content", kind="reference", layers=4, heads=4,
                embed_dim=32, window=8, max_len=512, seed=11),
    ModelConfig(model_id="wording", kind="reference", layers=4, heads=4,
                embed_dim=32, window=8, max_len=512, seed=23),
])

log_path = Path(tempfile.mkdtemp()) / "events.ldjson"
log = EventLog(log_path)
for text in REVISIONS:
    assignment = Assignment("demo", SOURCE, [SummarySlot("slotA", text)])
    scores = [
        (slot.slot_id, mid, registry.score_pair(mid, SOURCE, slot.text).score)
        for slot in assignment.slots
        for mid in ("content", "wording")
    ]
    record = log.record_run(assignment, scores)
    print(f"run {record.run_number}: " + ", ".join(
        f"{e.model_id}={e.score:+.3f}" for e in record.entries))

print("\nhistory for slotA (every revision recoverable):")
for row in log.get_history("slotA"):
    print(f"  run {row['run_number']} [{row['model_id']}] "
          f"{row['score']:+.3f}  {row['summary_text']!r}")

store = TrainingStore()
with ir.as_file(ir.files("scorelens.data").joinpath("training_corpus.jsonl")) as p:
    print(f"\ningested {store.ingest(p).accepted} training examples")

payload = scatter_payload(store, log, "content", "wording")
print(f"scatter: {len(payload['training_points'])} training dots, "
      f"{len(payload['current_points'])} current dots, "
      f"{len(payload['run_arrows'])} provenance arrows")
print("x-axis histogram counts:", [b["count"] for b in payload["x_hist"]])

rubric = np.array([ex.rubric for ex in store.examples() if ex.rubric])
content, wording = derive_component_scores(rubric)
print(f"\nre-derived targets: content mean {content.mean():+.1e}, "
      f"std {content.std(ddof=1):.6f}; corr(content, wording) "
      f"{np.corrcoef(content, wording)[0, 1]:+.1e}")
