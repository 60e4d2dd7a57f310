import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from scorelens.assignments import Assignment, SummarySlot
from scorelens.provenance import (
    DegenerateRubricError,
    EventLog,
    TrainingStore,
    derive_component_scores,
    example_slot_id,
    load_example,
    scatter_payload,
)

# Frozen 8x6 rubric fixture; expected components computed below by an
# independent eigendecomposition-of-covariance oracle.
RUBRIC_8x6 = np.array(
    [
        [3.5, 3.0, 2.5, 3.0, 2.0, 2.5],
        [1.5, 2.0, 1.5, 2.0, 3.5, 3.0],
        [4.0, 3.5, 4.0, 3.5, 2.5, 2.0],
        [2.0, 1.5, 2.0, 2.5, 1.0, 1.5],
        [3.0, 3.5, 3.0, 2.5, 4.0, 3.5],
        [1.0, 1.5, 1.0, 1.5, 2.0, 2.5],
        [2.5, 3.0, 3.5, 3.0, 1.5, 1.0],
        [3.5, 4.0, 3.0, 3.5, 3.0, 3.5],
    ]
)


def oracle_pca(X):
    """Brute-force PCA oracle: covariance by explicit loops, eigendecomposition
    via numpy, scores by direct projection."""
    n, m = X.shape
    means = [sum(X[:, j]) / n for j in range(m)]
    Xc = np.array([[X[i, j] - means[j] for j in range(m)] for i in range(n)])
    cov = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            cov[a, b] = sum(Xc[i, a] * Xc[i, b] for i in range(n)) / (n - 1)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1][:2]
    return Xc @ vecs[:, order]


def make_assignment(text="a cat sat", slot_id="slotA"):
    return Assignment(
        assignment_id="a1",
        source="the cat sat on the mat",
        slots=[SummarySlot(slot_id=slot_id, text=text)],
    )


class TestEventLog:
    def test_monotonic_run_numbers(self, tmp_path):
        log = EventLog(tmp_path / "events.ldjson")
        a = make_assignment()
        numbers = [
            log.record_run(a, [("slotA", "content", 0.1)]).run_number
            for _ in range(3)
        ]
        assert numbers == [1, 2, 3]

    def test_identical_text_same_hash_new_run(self, tmp_path):
        log = EventLog(tmp_path / "events.ldjson")
        a = make_assignment()
        r1 = log.record_run(a, [("slotA", "content", 0.1)])
        r2 = log.record_run(a, [("slotA", "content", 0.1)])
        assert r2.run_number == r1.run_number + 1
        assert r1.entries[0].summary_sha256 == r2.entries[0].summary_sha256

    def test_restart_resumes_numbering(self, tmp_path):
        path = tmp_path / "events.ldjson"
        log = EventLog(path)
        a = make_assignment()
        log.record_run(a, [("slotA", "content", 0.1)])
        log.record_run(a, [("slotA", "content", 0.2)])
        reopened = EventLog(path)
        r = reopened.record_run(a, [("slotA", "content", 0.3)])
        assert r.run_number == 3

    def test_replay_reconstructs_identical_state(self, tmp_path):
        path = tmp_path / "events.ldjson"
        log = EventLog(path)
        for i in range(5):
            log.record_run(make_assignment(text=f"v{i}"), [("slotA", "content", i / 10)])
        replayed = EventLog(path)
        assert [r.to_payload() for r in replayed.records()] == [
            r.to_payload() for r in log.records()
        ]

    def test_history(self, tmp_path):
        log = EventLog(tmp_path / "events.ldjson")
        assert log.get_history("nope") == []
        texts = ["draft one", "draft two", "draft three"]
        for t in texts:
            log.record_run(make_assignment(text=t), [("slotA", "content", 0.5)])
        rows = log.get_history("slotA")
        assert [r["run_number"] for r in rows] == [1, 2, 3]
        assert rows[1]["summary_text"] == "draft two"

    def test_empty_run_rejected(self, tmp_path):
        log = EventLog(tmp_path / "events.ldjson")
        with pytest.raises(ValueError):
            log.record_run(make_assignment(), [])

    def test_cross_process_restart(self, tmp_path):
        # First 5 runs happen in a separate process; numbering resumes here.
        path = tmp_path / "events.ldjson"
        script = (
            "import sys\n"
            "from scorelens.provenance import EventLog\n"
            "from scorelens.assignments import Assignment, SummarySlot\n"
            "a = Assignment('a1', 'src', [SummarySlot('slotA', 'text')])\n"
            f"log = EventLog({str(path)!r})\n"
            "for i in range(5):\n"
            "    log.record_run(a, [('slotA', 'content', i / 10)])\n"
        )
        subprocess.run([sys.executable, "-c", script], check=True)
        log = EventLog(path)
        r = log.record_run(make_assignment(), [("slotA", "content", 0.9)])
        assert r.run_number == 6
        assert [rec.run_number for rec in log.records()] == [1, 2, 3, 4, 5, 6]


class TestTrainingStore:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("")
        assert TrainingStore().ingest(path).accepted == 0

    def test_malformed_lines_reported(self, tmp_path):
        corpus = Path(__file__).resolve().parents[0].parent / (
            "src/scorelens/data/training_corpus.jsonl"
        )
        lines = corpus.read_text().strip().splitlines()
        lines[10] = "this is not json"
        lines[30] = json.dumps({"example_id": "bad", "source": "s"})  # missing fields
        path = tmp_path / "corpus.jsonl"
        path.write_text("\n".join(lines) + "\n")
        store = TrainingStore()
        report = store.ingest(path)
        assert report.accepted == 48
        assert sorted(line for line, _ in report.rejected) == [11, 31]

    def test_roundtrip_byte_identical(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        rec = {
            "example_id": "e1",
            "source": "café source ✓",
            "summary": "a summary",
            "content": 0.25,
            "wording": -1.5,
            "rubric": [1, 2, 3, 4, 3.5, 2.5],
        }
        path.write_text(json.dumps(rec) + "\n")
        store = TrainingStore()
        assert store.ingest(path).accepted == 1
        ex = store.get("e1")
        assert ex.source == rec["source"] and ex.summary == rec["summary"]

    def test_rubric_bounds_enforced(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        rec = {"example_id": "e1", "source": "s", "summary": "t",
               "content": 0.0, "wording": 0.0, "rubric": [0.5, 2, 3, 4, 3, 2]}
        path.write_text(json.dumps(rec) + "\n")
        report = TrainingStore().ingest(path)
        assert report.accepted == 0 and len(report.rejected) == 1


class TestDeriveComponentScores:
    def test_identical_rows_degenerate(self):
        X = np.tile([2.0, 3.0, 2.5, 3.0, 2.0, 1.5], (5, 1))
        with pytest.raises(DegenerateRubricError, match="degenerate rubric criterion"):
            derive_component_scores(X)

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            derive_component_scores(RUBRIC_8x6[:2])

    def test_z_normalization(self):
        content, wording = derive_component_scores(RUBRIC_8x6)
        for v in (content, wording):
            assert abs(v.mean()) <= 1e-9
            assert abs(v.std(ddof=1) - 1.0) <= 1e-9

    def test_orthogonality(self):
        content, wording = derive_component_scores(RUBRIC_8x6)
        assert abs(np.corrcoef(content, wording)[0, 1]) <= 1e-6

    def test_matches_eigendecomposition_oracle(self):
        content, wording = derive_component_scores(RUBRIC_8x6)
        expected = oracle_pca(RUBRIC_8x6)

        def z(v):
            return (v - v.mean()) / v.std(ddof=1)

        matched = 0
        for j in range(2):
            ez = z(expected[:, j])
            for derived in (content, wording):
                if np.allclose(derived, ez, atol=1e-8) or np.allclose(
                    derived, -ez, atol=1e-8
                ):
                    matched += 1
                    break
        assert matched == 2

    def test_content_loads_on_content_criteria(self):
        # Content correlates with the mean of the first four criteria at least
        # as strongly as wording does.
        content, wording = derive_component_scores(RUBRIC_8x6)
        cmean = RUBRIC_8x6[:, :4].mean(axis=1)
        assert abs(np.corrcoef(content, cmean)[0, 1]) >= abs(
            np.corrcoef(wording, cmean)[0, 1]
        ) - 1e-9


class TestScatterPayload:
    def _setup(self, tmp_path):
        store = TrainingStore()
        store.ingest(
            Path(__file__).resolve().parents[1]
            / "src/scorelens/data/training_corpus.jsonl"
        )
        log = EventLog(tmp_path / "events.ldjson")
        return store, log

    def test_one_arrow_per_consecutive_run_pair(self, tmp_path):
        store, log = self._setup(tmp_path)
        a = make_assignment()
        log.record_run(a, [("slotA", "content", 0.1), ("slotA", "wording", 0.2)])
        log.record_run(a, [("slotA", "content", 0.3), ("slotA", "wording", 0.4)])
        payload = scatter_payload(store, log, "content", "wording")
        assert len(payload["run_arrows"]) == 1
        arrow = payload["run_arrows"][0]
        assert (arrow["from_run"], arrow["to_run"]) == (1, 2)
        assert (arrow["x0"], arrow["y0"], arrow["x1"], arrow["y1"]) == (0.1, 0.2, 0.3, 0.4)

    def test_arrows_never_cross_slots(self, tmp_path):
        store, log = self._setup(tmp_path)
        a = Assignment("a1", "src", [SummarySlot("s1", "one"), SummarySlot("s2", "two")])
        for i in range(3):
            log.record_run(a, [
                ("s1", "content", i * 0.1), ("s1", "wording", i * 0.1),
                ("s2", "content", -i * 0.1), ("s2", "wording", -i * 0.1),
            ])
        payload = scatter_payload(store, log, "content", "wording")
        assert len(payload["run_arrows"]) == 4
        for arrow in payload["run_arrows"]:
            assert arrow["slot_id"] in ("s1", "s2")

    def test_histogram_partition(self, tmp_path):
        store, log = self._setup(tmp_path)
        payload = scatter_payload(store, log, "content", "wording")
        assert len(payload["x_hist"]) == 20
        assert sum(b["count"] for b in payload["x_hist"]) == len(store)
        assert sum(b["count"] for b in payload["y_hist"]) == len(store)

    def test_histogram_edges_match_linspace_oracle(self, tmp_path):
        store, log = self._setup(tmp_path)
        payload = scatter_payload(store, log, "content", "wording")
        xs = [p["x"] for p in payload["training_points"]]
        edges = np.linspace(min(xs), max(xs), 21)
        for i, b in enumerate(payload["x_hist"]):
            assert b["lo"] == pytest.approx(edges[i])
            assert b["hi"] == pytest.approx(edges[i + 1])

    def test_empty_corpus(self, tmp_path):
        log = EventLog(tmp_path / "events.ldjson")
        a = make_assignment()
        log.record_run(a, [("slotA", "content", 0.1), ("slotA", "wording", 0.2)])
        payload = scatter_payload(TrainingStore(), log, "content", "wording")
        assert payload["training_points"] == []
        assert payload["x_hist"] == []
        assert len(payload["current_points"]) == 1


class TestLoadExample:
    def _store(self):
        store = TrainingStore()
        store.ingest(
            Path(__file__).resolve().parents[1]
            / "src/scorelens/data/training_corpus.jsonl"
        )
        return store

    def test_unknown_id(self):
        with pytest.raises(KeyError):
            load_example(self._store(), "nope")

    def test_roundtrip_source(self):
        store = self._store()
        assignment = load_example(store, "ex000")
        assert assignment.source == store.get("ex000").source
        assert assignment.slots[0].text == store.get("ex000").summary

    def test_scores_found_again_after_reload(self, tmp_path):
        store = self._store()
        log = EventLog(tmp_path / "events.ldjson")
        assignment = load_example(store, "ex001")
        slot = example_slot_id("ex001")
        log.record_run(assignment, [(slot, "content", 0.42)])
        reloaded = load_example(store, "ex001")
        assert reloaded.slots[0].slot_id == slot
        history = log.get_history(slot)
        assert len(history) == 1 and history[0]["score"] == 0.42
