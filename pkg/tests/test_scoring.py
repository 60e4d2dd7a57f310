import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from forward_oracle import slow_forward
from scorelens.scoring import (
    ExternalScorerError,
    MaskSpec,
    ModelConfig,
    ModelNotFoundError,
    ModelRegistry,
    SchemaViolationError,
    SummaryTooLongError,
    build_attention_mask,
    build_model_input,
    external_score,
    reference_forward_raw,
)
from scorelens.segmentation import subword_tokenize


class TestModelConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelConfig(model_id="x", kind="reference", window=3)
        with pytest.raises(ValueError):
            ModelConfig(model_id="x", kind="reference", embed_dim=30, heads=4)
        with pytest.raises(ValueError):
            ModelConfig(model_id="x", kind="external")  # endpoint required

    def test_deployed_scale_preset_is_valid(self):
        from scorelens.scoring import DEPLOYED_SCALE

        cfg = ModelConfig(model_id="deployed", kind="reference", **DEPLOYED_SCALE)
        assert cfg.layers == 12 and cfg.max_len == 4096


class TestBuildModelInput:
    def test_layout_arithmetic(self, tiny_config):
        src = "alpha beta gamma delta epsilon zeta eta theta iota kappa"
        summ = "one two three four five"
        mi = build_model_input(src, summ, tiny_config)
        n_src = len(subword_tokenize(src))
        n_sum = len(subword_tokenize(summ))
        assert len(mi) == n_src + n_sum + 3
        assert mi.segment[0] == "begin_marker"
        assert mi.segment[-1] == "end_marker"
        assert mi.segment.count("separator") == 1
        assert not mi.truncated

    def test_truncation_keeps_summary(self):
        cfg = ModelConfig(model_id="m", kind="reference", max_len=32, window=4,
                          layers=1, heads=1, embed_dim=8)
        src = " ".join(f"word{i}" for i in range(100))
        summ = "short summary here"
        mi = build_model_input(src, summ, cfg)
        assert len(mi) == 32
        assert mi.truncated
        n_sum = len(subword_tokenize(summ))
        assert mi.segment.count("summary") == n_sum

    def test_summary_too_long(self):
        cfg = ModelConfig(model_id="m", kind="reference", max_len=8, window=4,
                          layers=1, heads=1, embed_dim=8)
        with pytest.raises(SummaryTooLongError, match="summary too long"):
            build_model_input("src", " ".join(f"w{i}" for i in range(50)), cfg)

    def test_summary_global_flags(self, tiny_config):
        from dataclasses import replace

        cfg = replace(tiny_config, global_mode="summary_global")
        mi = build_model_input("a b c", "x y", cfg)
        for flag, seg in zip(mi.global_flags, mi.segment):
            assert flag == (seg in ("begin_marker", "summary"))

    def test_cls_only_flags(self, tiny_config):
        mi = build_model_input("a b c", "x y", tiny_config)
        assert mi.global_flags[0] is True
        assert sum(mi.global_flags) == 1

    def test_summary_token_preservation_under_truncation(self):
        cfg = ModelConfig(model_id="m", kind="reference", max_len=24, window=4,
                          layers=1, heads=1, embed_dim=8)
        src = " ".join(f"word{i}" for i in range(80))
        summ = "the quick brown fox"
        mi = build_model_input(src, summ, cfg)
        summary_surfaces = [
            s.surface for s, seg in zip(mi.spans, mi.segment) if seg == "summary"
        ]
        assert summary_surfaces == [t.surface for t in subword_tokenize(summ)]


class TestAttentionMask:
    def test_single_token(self):
        mask = MaskSpec(n=1, half_window=2, global_flags=np.array([True]))
        assert mask.allowed(0, 0)

    def test_window_arithmetic_cls_only(self):
        glob = np.zeros(10, dtype=bool)
        glob[0] = True
        mask = MaskSpec(n=10, half_window=2, global_flags=glob)
        allowed = {k for k in range(10) if mask.allowed(7, k)}
        assert allowed == {5, 6, 7, 8, 9, 0}

    def test_mask_union_summary_global(self):
        glob = np.zeros(10, dtype=bool)
        glob[[6, 7, 8]] = True
        mask = MaskSpec(n=10, half_window=2, global_flags=glob)
        allowed = {k for k in range(10) if mask.allowed(1, k)}
        assert allowed == {0, 1, 2, 3, 6, 7, 8}

    def test_global_symmetry_property(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(2, 40))
            glob = rng.random(n) < 0.2
            glob[0] = True
            mask = MaskSpec(n=n, half_window=3, global_flags=glob)
            dense = mask.dense()
            for k in range(n):
                if glob[k]:
                    assert dense[:, k].all() and dense[k, :].all()
                else:
                    far_nonglobal_q = [
                        q for q in range(n) if abs(q - k) > 3 and not glob[q]
                    ]
                    if far_nonglobal_q:
                        assert not dense[:, k].all()
            assert np.diag(dense).all()


class TestReferenceForward:
    def test_determinism(self, tiny_config):
        mi = build_model_input("the cat sat", "a cat", tiny_config)
        s1, a1, _ = reference_forward_raw(mi, tiny_config)
        s2, a2, _ = reference_forward_raw(mi, tiny_config)
        assert s1 == s2
        assert np.array_equal(a1, a2)

    def test_softmax_rows_sum_to_one(self, tiny_config):
        mi = build_model_input("one two three four five", "six seven", tiny_config)
        _, raw, mask = reference_forward_raw(mi, tiny_config)
        dense = mask.dense()
        sums = raw.sum(axis=-1)
        assert np.allclose(sums, 1.0, atol=1e-5)
        assert not raw[:, :, ~dense].any()

    def test_matches_bruteforce_oracle(self, tiny_config, fixture_pairs):
        src, summ = fixture_pairs[0]
        mi = build_model_input(src, summ, tiny_config)
        score, raw, _ = reference_forward_raw(mi, tiny_config)
        oracle_score, oracle_attn = slow_forward(mi, tiny_config)
        assert score == pytest.approx(oracle_score, abs=1e-6)
        assert np.allclose(raw, np.array(oracle_attn), atol=1e-8)


class TestScorePair:
    def test_model_not_found(self, registry):
        with pytest.raises(ModelNotFoundError, match="model not found"):
            registry.score_pair("nope", "a", "b")

    def test_attention_absent_when_not_requested(self, registry):
        result = registry.score_pair("tiny", "the cat", "a cat")
        assert result.attention is None

    def test_composition_equals_forward(self, registry, tiny_config):
        result = registry.score_pair("tiny", "the cat sat", "a cat")
        mi = build_model_input("the cat sat", "a cat", tiny_config)
        score, _, _ = reference_forward_raw(mi, tiny_config)
        assert result.score == score

    def test_score_invariance_bit_for_bit(self, registry):
        r1 = registry.score_pair("content", "source text here", "summary", True)
        r2 = registry.score_pair("content", "source text here", "summary", True)
        assert r1.score == r2.score
        assert np.array_equal(r1.attention.band, r2.attention.band)


class _StubHandler(BaseHTTPRequestHandler):
    response_payload = {"score": 0.0, "truncated": False, "tokens": []}
    status = 200

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        self.rfile.read(length)
        body = json.dumps(type(self).response_payload).encode()
        self.send_response(type(self).status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestExternalScore:
    def test_echo(self, stub_server):
        _StubHandler.response_payload = {"score": 0.0, "truncated": False, "tokens": []}
        _StubHandler.status = 200
        result = external_score(stub_server, {"model_id": "ext"})
        assert result.score == 0.0

    def test_malformed_attention_names_field(self, stub_server):
        _StubHandler.response_payload = {
            "score": 1.0, "truncated": False, "tokens": [],
            "attention": {"layers": 1, "heads": 1, "global_indices": [],
                          "band": [], "global_rows": [], "global_cols": []},
        }
        with pytest.raises(SchemaViolationError, match="attention.window"):
            external_score(stub_server, {"model_id": "ext"})

    def test_non_success_status(self, stub_server):
        _StubHandler.response_payload = {"score": 1.0}
        _StubHandler.status = 500
        try:
            with pytest.raises(ExternalScorerError, match="non-success status 500"):
                external_score(stub_server, {"model_id": "ext"})
        finally:
            _StubHandler.status = 200

    def test_recorded_reference_fixture_roundtrip(self, stub_server, registry):
        # Record a response from the reference scorer itself, replay it
        # through the wire decoder, and check the tensor invariants.
        result = registry.score_pair("tiny", "the cat sat on a mat", "a cat sat",
                                     want_attention=True)
        _StubHandler.response_payload = {
            "score": result.score,
            "truncated": result.truncated,
            "tokens": result.model_input.token_payload(),
            "attention": result.attention.to_payload(),
        }
        decoded = external_score(stub_server, {"model_id": "tiny"})
        tensor = decoded.attention
        assert tensor.n == result.attention.n
        for l in range(tensor.layers):
            for h in range(tensor.heads):
                for q in range(tensor.n):
                    assert sum(tensor.row_values(l, h, q)) == pytest.approx(1.0, abs=1e-5)

    def test_unreachable(self):
        with pytest.raises(ExternalScorerError, match="unreachable"):
            external_score("http://127.0.0.1:1", {"model_id": "x"}, timeout=0.5)


class TestRegistryFile:
    def test_from_file(self, tmp_path):
        path = tmp_path / "models.json"
        path.write_text(json.dumps([
            {"model_id": "a", "kind": "reference", "seed": 1},
        ]))
        registry = ModelRegistry.from_file(path)
        assert registry.get("a").seed == 1
