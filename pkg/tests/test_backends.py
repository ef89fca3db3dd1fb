"""Backends: mock determinism, fixture replay/recording, HTTP client."""

import json

import pytest
import requests

from interscene import (
    BackendTimeout,
    FixtureMiss,
    GenerationParams,
    HttpBackend,
    HttpStatusError,
    MalformedResponse,
    MockBackend,
    PromptRequest,
    RecordingBackend,
    ReplayBackend,
    UnknownScene,
)
from interscene.backends import request_key
from interscene.fixtures import FRISBEE_PARK, default_scenes


def make_request(template_id="spatial_init", text="describe", image="frisbee_park", **params):
    return PromptRequest(template_id, text, image, GenerationParams(**params))


class TestGenerationParams:
    def test_defaults(self):
        p = GenerationParams()
        assert (p.temperature, p.top_p, p.max_output_tokens) == (0.2, 0.9, 128)
        assert p.num_candidates == 1
        assert p.seed is None

    def test_validation(self):
        with pytest.raises(ValueError):
            GenerationParams(temperature=-0.1)
        with pytest.raises(ValueError):
            GenerationParams(top_p=0)
        with pytest.raises(ValueError):
            GenerationParams(num_candidates=0)

    def test_unknown_template_rejected(self):
        with pytest.raises(ValueError):
            PromptRequest("nope", "text", "img")


class TestMockBackend:
    def test_same_request_same_output(self):
        backend = MockBackend(default_scenes(), seed=0)
        req = make_request()
        assert backend.generate(req) == backend.generate(req)

    def test_unknown_scene_raises(self):
        backend = MockBackend(default_scenes(), seed=0)
        with pytest.raises(UnknownScene):
            backend.generate(make_request(image="not-a-scene"))

    def test_group_size_honored(self):
        backend = MockBackend(default_scenes(), seed=0)
        group = backend.generate_group(make_request(template_id="qa_generation"), 4)
        assert len(group) == 4

    def test_group_members_vary_with_subseed(self):
        backend = MockBackend(default_scenes(), seed=0)
        group = backend.generate_group(make_request(template_id="qa_generation"), 4)
        assert group == list(FRISBEE_PARK.qa_candidates)

    def test_request_seed_overrides_backend_seed(self):
        backend = MockBackend(default_scenes(), seed=5)
        with_param = backend.generate(make_request(template_id="qa_generation", seed=0))
        assert with_param == FRISBEE_PARK.qa_candidates[0]


class TestReplayBackend:
    def test_round_trip_through_recording(self, tmp_path):
        inner = MockBackend(default_scenes(), seed=0)
        recorder = RecordingBackend(inner, tmp_path)
        req = make_request()
        live = recorder.generate(req)

        replay = ReplayBackend(tmp_path)
        assert replay.generate(req) == live

    def test_missing_fixture_names_key(self, tmp_path):
        (tmp_path / "manifest.json").write_text("{}")
        replay = ReplayBackend(tmp_path)
        req = make_request()
        with pytest.raises(FixtureMiss) as exc:
            replay.generate(req)
        assert request_key(req) in str(exc.value)

    def test_group_fixtures(self, tmp_path):
        inner = MockBackend(default_scenes(), seed=0)
        recorder = RecordingBackend(inner, tmp_path)
        req = make_request(template_id="qa_generation")
        group = recorder.generate_group(req, 3)

        replay = ReplayBackend(tmp_path)
        assert replay.generate_group(req, 3) == group
        assert replay.generate_group(req, 2) == group[:2]
        with pytest.raises(FixtureMiss):
            replay.generate_group(req, 4)

    def test_single_fixture_repeats_for_group(self, tmp_path):
        req = make_request()
        key = request_key(req)
        (tmp_path / "manifest.json").write_text(json.dumps({key: "only.txt"}))
        (tmp_path / "only.txt").write_text("- <cup, on, table>")
        replay = ReplayBackend(tmp_path)
        assert replay.generate_group(req, 3) == ["- <cup, on, table>"] * 3

    def test_key_depends_on_rendered_text(self):
        a = request_key(make_request(text="one"))
        b = request_key(make_request(text="two"))
        assert a != b


class _StubResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload
        self.text = text or (json.dumps(payload) if payload is not None else "")

    def json(self):
        if self._payload is None:
            raise ValueError("not json")
        return self._payload


class _StubSession:
    """Plays back a scripted list of responses/exceptions and logs calls."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append({"url": url, "json": json, "headers": headers, "timeout": timeout})
        step = self.script.pop(0)
        if isinstance(step, Exception):
            raise step
        return step


def _chat_payload(text):
    return {"choices": [{"message": {"content": text}}]}


def make_http_backend(script, **kwargs):
    session = _StubSession(script)
    sleeps = []
    backend = HttpBackend(
        "http://llm.test/v1/chat/completions",
        "scene-model",
        session=session,
        sleeper=sleeps.append,
        **kwargs,
    )
    return backend, session, sleeps


class TestHttpBackend:
    def test_first_choice_extracted(self):
        backend, session, _ = make_http_backend([_StubResponse(payload=_chat_payload("- <cup, on, table>"))])
        assert backend.generate(make_request()) == "- <cup, on, table>"
        body = session.calls[0]["json"]
        assert body["model"] == "scene-model"
        assert body["messages"][0] == {"role": "system", "content": "You are an AI assistant."}
        assert body["temperature"] == 0.2
        assert body["top_p"] == 0.9
        assert body["max_tokens"] == 128

    def test_group_is_one_post_per_candidate(self):
        script = [_StubResponse(payload=_chat_payload(f"text {i}")) for i in range(3)]
        backend, session, _ = make_http_backend(script)
        group = backend.generate_group(make_request(), 3)
        assert group == ["text 0", "text 1", "text 2"]
        assert len(session.calls) == 3

    def test_retries_on_retriable_status_with_backoff(self):
        script = [
            _StubResponse(status_code=503, text="busy"),
            _StubResponse(status_code=429, text="slow down"),
            _StubResponse(payload=_chat_payload("ok")),
        ]
        backend, session, sleeps = make_http_backend(script)
        assert backend.generate(make_request()) == "ok"
        assert len(session.calls) == 3
        assert sleeps == [0.25, 0.5]

    def test_retry_budget_exhausted_raises_last_error(self):
        script = [_StubResponse(status_code=503, text="busy")] * 3
        backend, _, _ = make_http_backend(script, max_retries=2)
        with pytest.raises(HttpStatusError) as exc:
            backend.generate(make_request())
        assert exc.value.status == 503

    def test_non_retriable_status_raises_immediately(self):
        backend, session, _ = make_http_backend([_StubResponse(status_code=400, text="bad")])
        with pytest.raises(HttpStatusError) as exc:
            backend.generate(make_request())
        assert exc.value.status == 400
        assert len(session.calls) == 1

    def test_timeout_retried_then_raised(self):
        script = [requests.Timeout(), requests.Timeout()]
        backend, _, sleeps = make_http_backend(script, max_retries=1)
        with pytest.raises(BackendTimeout):
            backend.generate(make_request())
        assert sleeps == [0.25]

    def test_malformed_payload_raises(self):
        backend, _, _ = make_http_backend([_StubResponse(payload={"unexpected": True})])
        with pytest.raises(MalformedResponse):
            backend.generate(make_request())

    def test_auth_header_from_env(self, monkeypatch):
        monkeypatch.setenv("TEST_LLM_TOKEN", "sekrit")
        backend, session, _ = make_http_backend(
            [_StubResponse(payload=_chat_payload("ok"))], auth_token_env="TEST_LLM_TOKEN"
        )
        backend.generate(make_request())
        assert session.calls[0]["headers"]["Authorization"] == "Bearer sekrit"

    def test_local_image_becomes_data_url(self, tmp_path):
        image = tmp_path / "scene.png"
        image.write_bytes(b"\x89PNG fake")
        backend, session, _ = make_http_backend(
            [_StubResponse(payload=_chat_payload("ok"))], images_dir=tmp_path
        )
        backend.generate(make_request(image="scene.png"))
        content = session.calls[0]["json"]["messages"][1]["content"]
        image_part = [c for c in content if c["type"] == "image_url"]
        assert len(image_part) == 1
        assert image_part[0]["image_url"]["url"].startswith("data:image/png;base64,")

    def test_url_image_passed_through(self):
        backend, session, _ = make_http_backend([_StubResponse(payload=_chat_payload("ok"))])
        backend.generate(make_request(image="https://imgs.test/1.jpg"))
        content = session.calls[0]["json"]["messages"][1]["content"]
        assert {"type": "image_url", "image_url": {"url": "https://imgs.test/1.jpg"}} in content
