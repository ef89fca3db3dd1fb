"""Flat dotted-key configuration shared by the CLI subcommands.

A config file is one JSON object whose keys are dotted paths into the
module settings ("backend.kind", "pipeline.n_focus", ...). Command-line
overrides use the same keys and win over file values. Unknown keys are
rejected outright so typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

import json
from pathlib import Path

from .backends import (
    GenerationBackend,
    GenerationParams,
    HttpBackend,
    MockBackend,
    RecordingBackend,
    ReplayBackend,
)
from .errors import ConfigError
from .fixtures import default_scenes, load_scenes_file
from .pipeline import PipelineConfig
from .rewards import RewardWeights

KNOWN_KEYS = {
    "backend.kind": str,
    "backend.seed": int,
    "backend.scenes_file": str,
    "backend.fixtures_dir": str,
    "backend.record_fixtures": str,
    "backend.endpoint_url": str,
    "backend.model": str,
    "backend.auth_token_env": str,
    "backend.timeout_ms": int,
    "backend.max_retries": int,
    "backend.max_concurrency": int,
    "backend.images_dir": str,
    "generation.temperature": float,
    "generation.top_p": float,
    "generation.max_output_tokens": int,
    "generation.num_candidates": int,
    "generation.seed": int,
    "pipeline.n_focus": int,
    "pipeline.m_salient": int,
    "pipeline.require_grounding": bool,
    "pipeline.exclusive_predicates": list,
    "pipeline.max_refinement_rounds": int,
    "pipeline.templates_dir": str,
    "reward.focus_weight": float,
    "reward.disamb_weight": float,
    "reward.irrelevance_weight": float,
    "reward.exact_match_bonus": float,
    "dataset.parallelism": int,
}

_BACKEND_KINDS = ("mock", "replay", "http")


def _check_keys(config: dict) -> None:
    for key in config:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")


def _coerce(key: str, value):
    want = KNOWN_KEYS[key]
    if want is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if want is int and isinstance(value, bool):
        raise ConfigError(f"config key {key!r} expects an integer, got {value!r}")
    if not isinstance(value, want):
        raise ConfigError(
            f"config key {key!r} expects {want.__name__}, got {type(value).__name__}"
        )
    return value


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a single JSON object")
    _check_keys(data)
    return {k: _coerce(k, v) for k, v in data.items()}


def parse_override(text: str):
    """One --set KEY=VALUE flag; VALUE parsed as JSON, else kept as string."""
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def merge_config(base: dict, overrides: dict) -> dict:
    _check_keys(overrides)
    merged = dict(base)
    merged.update({k: _coerce(k, v) for k, v in overrides.items()})
    return merged


def make_generation_params(config: dict) -> GenerationParams:
    defaults = GenerationParams()
    return GenerationParams(
        temperature=config.get("generation.temperature", defaults.temperature),
        top_p=config.get("generation.top_p", defaults.top_p),
        max_output_tokens=config.get(
            "generation.max_output_tokens", defaults.max_output_tokens
        ),
        num_candidates=config.get("generation.num_candidates", defaults.num_candidates),
        seed=config.get("generation.seed", defaults.seed),
    )


def make_pipeline_config(config: dict) -> PipelineConfig:
    defaults = PipelineConfig()
    raw_sets = config.get("pipeline.exclusive_predicates", ())
    exclusive = []
    for group in raw_sets:
        if not isinstance(group, (list, tuple)) or not all(
            isinstance(p, str) for p in group
        ):
            raise ConfigError("pipeline.exclusive_predicates must be a list of string lists")
        exclusive.append(tuple(group))
    return PipelineConfig(
        n_focus=config.get("pipeline.n_focus", defaults.n_focus),
        m_salient=config.get("pipeline.m_salient", defaults.m_salient),
        require_grounding=config.get(
            "pipeline.require_grounding", defaults.require_grounding
        ),
        exclusive_predicate_sets=tuple(exclusive),
        max_refinement_rounds=config.get(
            "pipeline.max_refinement_rounds", defaults.max_refinement_rounds
        ),
        templates_dir=config.get("pipeline.templates_dir", defaults.templates_dir),
    )


def make_weights(config: dict) -> RewardWeights:
    defaults = RewardWeights()
    return RewardWeights(
        focus_weight=config.get("reward.focus_weight", defaults.focus_weight),
        disamb_weight=config.get("reward.disamb_weight", defaults.disamb_weight),
        irrelevance_weight=config.get(
            "reward.irrelevance_weight", defaults.irrelevance_weight
        ),
        exact_match_bonus=config.get(
            "reward.exact_match_bonus", defaults.exact_match_bonus
        ),
    )


def make_backend(config: dict) -> GenerationBackend:
    kind = config.get("backend.kind", "mock")
    if kind not in _BACKEND_KINDS:
        raise ConfigError(f"backend.kind must be one of {_BACKEND_KINDS}, got {kind!r}")
    if kind == "mock":
        scenes_file = config.get("backend.scenes_file")
        scenes = load_scenes_file(scenes_file) if scenes_file else default_scenes()
        backend: GenerationBackend = MockBackend(scenes, seed=config.get("backend.seed", 0))
    elif kind == "replay":
        fixtures_dir = config.get("backend.fixtures_dir")
        if not fixtures_dir:
            raise ConfigError("backend.kind=replay requires backend.fixtures_dir")
        backend = ReplayBackend(fixtures_dir)
    else:
        endpoint = config.get("backend.endpoint_url")
        model = config.get("backend.model")
        if not endpoint or not model:
            raise ConfigError("backend.kind=http requires endpoint_url and model")
        backend = HttpBackend(
            endpoint,
            model,
            auth_token_env=config.get("backend.auth_token_env"),
            timeout_ms=config.get("backend.timeout_ms", 30000),
            max_retries=config.get("backend.max_retries", 3),
            max_concurrency=config.get("backend.max_concurrency", 4),
            images_dir=config.get("backend.images_dir"),
        )
    record_dir = config.get("backend.record_fixtures")
    if record_dir:
        backend = RecordingBackend(backend, record_dir)
    return backend
