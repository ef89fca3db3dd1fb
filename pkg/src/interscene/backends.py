"""Generation backends: mock, replay, and HTTP chat-completion.

All backends satisfy the same two-method contract: generate() returns one
completion, generate_group() returns exactly k completions. The mock is a
pure function of (seed, request) so pipelines built on it are reproducible
byte for byte; replay serves recorded fixtures and never touches the
network.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    BackendError,
    BackendTimeout,
    FixtureMiss,
    HttpStatusError,
    MalformedResponse,
    UnknownScene,
)
from .fixtures import SceneSpec, default_scenes
from .prompts import TEMPLATE_IDS


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.2
    top_p: float = 0.9
    max_output_tokens: int = 128
    num_candidates: int = 1
    seed: int | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.top_p <= 1):
            raise ValueError("top_p must be in (0, 1]")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")
        if self.num_candidates < 1:
            raise ValueError("num_candidates must be >= 1")


@dataclass(frozen=True)
class PromptRequest:
    template_id: str
    rendered_text: str
    image_ref: str
    params: GenerationParams = field(default_factory=GenerationParams)

    def __post_init__(self):
        if self.template_id not in TEMPLATE_IDS:
            raise ValueError(f"unknown template id {self.template_id!r}")
        if not self.rendered_text.strip():
            raise ValueError("rendered_text must be non-empty")


def request_key(request: PromptRequest) -> str:
    """Stable identity of a request for fixture lookup and recording."""
    digest = hashlib.sha256(
        "\x1f".join([request.template_id, request.rendered_text, request.image_ref]).encode("utf-8")
    )
    return digest.hexdigest()[:16]


class GenerationBackend:
    """Interface for anything that can answer a rendered prompt."""

    def generate_group(self, request: PromptRequest, k: int | None = None) -> list[str]:
        raise NotImplementedError

    def generate(self, request: PromptRequest) -> str:
        return self.generate_group(request, 1)[0]


class MockBackend(GenerationBackend):
    """Scripted deterministic backend over configured synthetic scenes.

    Output is a pure function of (template_id, image_ref, seed): triple
    templates emit the scene's scripted lines rotated by the seed, the QA
    template picks from the scene's candidate answer pool. Candidate i of a
    group uses sub-seed seed + i, so groups are distinct but reproducible.
    """

    def __init__(self, scenes: dict[str, SceneSpec] | None = None, seed: int = 0):
        self.scenes = dict(scenes) if scenes is not None else default_scenes()
        self.seed = seed

    def generate_group(self, request: PromptRequest, k: int | None = None) -> list[str]:
        if k is None:
            k = request.params.num_candidates
        scene = self.scenes.get(request.image_ref)
        if scene is None:
            raise UnknownScene(f"mock backend has no scene for image {request.image_ref!r}")
        base = request.params.seed if request.params.seed is not None else self.seed
        return [self._render(scene, request.template_id, base + i) for i in range(k)]

    @staticmethod
    def _render(scene: SceneSpec, template_id: str, sub_seed: int) -> str:
        if template_id == "spatial_init":
            return _triple_lines(scene.spatial_triples, sub_seed)
        if template_id == "abstract":
            return _triple_lines(scene.abstract_triples, sub_seed)
        if template_id in ("interaction_knowledge", "interaction_graph"):
            return _triple_lines(scene.interaction_triples, sub_seed)
        if template_id == "qa_generation":
            pool = scene.qa_candidates
            if not pool:
                return ""
            return pool[sub_seed % len(pool)]
        raise BackendError(f"mock cannot render template {template_id!r}")


def _triple_lines(triples, sub_seed: int) -> str:
    items = list(triples)
    if not items:
        return ""
    k = sub_seed % len(items)
    rotated = items[k:] + items[:k]
    return "\n".join(f"- <{s}, {p}, {o}>" for s, p, o in rotated)


class ReplayBackend(GenerationBackend):
    """Serves recorded completions from a fixture directory.

    The directory holds a manifest.json mapping request keys (see
    request_key) to a fixture file name, or to a list of file names for
    grouped candidates. Missing keys raise FixtureMiss naming the key. No
    network is ever touched.
    """

    def __init__(self, fixtures_dir: str | Path):
        self.root = Path(fixtures_dir)
        manifest_path = self.root / "manifest.json"
        try:
            self.manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise BackendError(f"cannot read replay manifest {manifest_path}: {exc}") from exc

    def generate_group(self, request: PromptRequest, k: int | None = None) -> list[str]:
        if k is None:
            k = request.params.num_candidates
        key = request_key(request)
        entry = self.manifest.get(key)
        if entry is None:
            raise FixtureMiss(key)
        if isinstance(entry, str):
            text = self._read(entry)
            return [text] * k
        texts = [self._read(name) for name in entry]
        if k > len(texts):
            raise FixtureMiss(f"{key} (need {k} candidates, recorded {len(texts)})")
        return texts[:k]

    def _read(self, name: str) -> str:
        path = self.root / name
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise BackendError(f"cannot read fixture {path}: {exc}") from exc


class RecordingBackend(GenerationBackend):
    """Wraps another backend and writes replay fixtures for every call."""

    def __init__(self, inner: GenerationBackend, fixtures_dir: str | Path):
        self.inner = inner
        self.root = Path(fixtures_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self._manifest_path = self.root / "manifest.json"
        if self._manifest_path.exists():
            self.manifest = json.loads(self._manifest_path.read_text(encoding="utf-8"))
        else:
            self.manifest = {}

    def generate_group(self, request: PromptRequest, k: int | None = None) -> list[str]:
        if k is None:
            k = request.params.num_candidates
        texts = self.inner.generate_group(request, k)
        key = request_key(request)
        names = []
        for i, text in enumerate(texts):
            name = f"{key}.{i}.txt" if len(texts) > 1 else f"{key}.txt"
            (self.root / name).write_text(text, encoding="utf-8")
            names.append(name)
        self.manifest[key] = names[0] if len(names) == 1 else names
        self._manifest_path.write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True), encoding="utf-8"
        )
        return texts


SYSTEM_MESSAGE = "You are an AI assistant."

_RETRIABLE_STATUSES = {429, 500, 502, 503, 504}


class HttpBackend(GenerationBackend):
    """Chat-completion client for an OpenAI-style JSON endpoint.

    Each completion is one POST; the first choice's message content is the
    result. Local image files are attached as base64 data URLs; refs that
    look like URLs are passed through. Retries with exponential backoff on
    timeouts, connection failures, and retriable statuses.
    """

    def __init__(
        self,
        endpoint_url: str,
        model: str,
        auth_token_env: str | None = None,
        timeout_ms: int = 30000,
        max_retries: int = 3,
        max_concurrency: int = 4,
        images_dir: str | Path | None = None,
        sleeper=time.sleep,
        session=None,
    ):
        import requests

        self.endpoint_url = endpoint_url
        self.model = model
        self.auth_token_env = auth_token_env
        self.timeout = timeout_ms / 1000.0
        self.max_retries = max_retries
        self.images_dir = Path(images_dir) if images_dir else None
        self._sleep = sleeper
        self._session = session or requests.Session()
        self._gate = threading.BoundedSemaphore(max(1, max_concurrency))

    def generate_group(self, request: PromptRequest, k: int | None = None) -> list[str]:
        if k is None:
            k = request.params.num_candidates
        return [self._one(request) for _ in range(k)]

    def _one(self, request: PromptRequest) -> str:
        body = self._body(request)
        headers = {"Content-Type": "application/json"}
        if self.auth_token_env:
            token = os.environ.get(self.auth_token_env)
            if token:
                headers["Authorization"] = f"Bearer {token}"
        import requests

        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(0.25 * (2 ** (attempt - 1)))
            try:
                with self._gate:
                    resp = self._session.post(
                        self.endpoint_url, json=body, headers=headers, timeout=self.timeout
                    )
            except requests.Timeout:
                last_error = BackendTimeout(f"request timed out after {self.timeout:.1f}s")
                continue
            except requests.RequestException as exc:
                last_error = BackendError(f"request failed: {exc}")
                continue
            if resp.status_code in _RETRIABLE_STATUSES:
                last_error = HttpStatusError(resp.status_code, resp.text[:200])
                continue
            if resp.status_code != 200:
                raise HttpStatusError(resp.status_code, resp.text[:200])
            return self._extract(resp)
        raise last_error if last_error is not None else BackendError("request failed")

    def _body(self, request: PromptRequest) -> dict:
        content: list[dict] = [{"type": "text", "text": request.rendered_text}]
        image_url = self._resolve_image(request.image_ref)
        if image_url:
            content.append({"type": "image_url", "image_url": {"url": image_url}})
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": SYSTEM_MESSAGE},
                {"role": "user", "content": content},
            ],
            "temperature": request.params.temperature,
            "top_p": request.params.top_p,
            "max_tokens": request.params.max_output_tokens,
        }
        if request.params.seed is not None:
            body["seed"] = request.params.seed
        return body

    def _resolve_image(self, image_ref: str) -> str | None:
        if not image_ref:
            return None
        if image_ref.startswith("http://") or image_ref.startswith("https://") or image_ref.startswith("data:"):
            return image_ref
        candidates = []
        if self.images_dir is not None:
            candidates.append(self.images_dir / image_ref)
        candidates.append(Path(image_ref))
        for path in candidates:
            if path.is_file():
                suffix = path.suffix.lower().lstrip(".") or "png"
                mime = {"jpg": "jpeg"}.get(suffix, suffix)
                data = base64.b64encode(path.read_bytes()).decode("ascii")
                return f"data:image/{mime};base64,{data}"
        return None

    @staticmethod
    def _extract(resp) -> str:
        try:
            data = resp.json()
        except ValueError as exc:
            raise MalformedResponse(f"response body is not JSON: {exc}") from exc
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise MalformedResponse(f"unexpected response shape: {str(data)[:200]}") from None
        if not isinstance(content, str):
            raise MalformedResponse("choice content is not a string")
        return content
