"""Exception types shared across the toolkit."""

from __future__ import annotations


class InterSceneError(Exception):
    """Base class for every error raised by this package."""


# --- graph construction ---

class InvalidBbox(InterSceneError):
    pass


class DuplicateDisplayName(InterSceneError):
    pass


class UnknownEntity(InterSceneError):
    pass


class SelfLoop(InterSceneError):
    pass


class EmptyGraph(InterSceneError):
    pass


# --- parsing ---

class UnpairedQuestion(InterSceneError):
    """A "Q:" block with no following "A:" block."""


# --- backends ---

class BackendError(InterSceneError):
    pass


class UnknownScene(BackendError):
    """Mock backend asked about an image_ref it has no scene for."""


class FixtureMiss(BackendError):
    """Replay backend has no fixture for a request key."""

    def __init__(self, key: str):
        super().__init__(f"no recorded fixture for request key {key}")
        self.key = key


class BackendTimeout(BackendError):
    pass


class HttpStatusError(BackendError):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"backend returned HTTP {status}" + (f": {detail}" if detail else ""))
        self.status = status


class MalformedResponse(BackendError):
    pass


# --- pipeline ---

class PipelineStageError(InterSceneError):
    """A stage failed; carries the partial trace accumulated so far."""

    def __init__(self, stage: str, cause: Exception, trace=None):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.trace = trace


# --- config / cli ---

class ConfigError(InterSceneError):
    pass


# --- dataset ---

class ManifestParse(InterSceneError):
    pass


class UnknownSource(InterSceneError):
    pass


class UnknownRecordId(InterSceneError):
    def __init__(self, record_id: str):
        super().__init__(f"unknown record id {record_id}")
        self.record_id = record_id


class UnwritableOutput(InterSceneError):
    pass


# --- review service ---

class BindFailure(InterSceneError):
    pass


class DatasetUnreadable(InterSceneError):
    pass
