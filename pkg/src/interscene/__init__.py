"""Interaction-aware scene graphs: staged construction, constraint
filtering, query generation, answer scoring, and review tooling."""

from .backends import (
    GenerationBackend,
    GenerationParams,
    HttpBackend,
    MockBackend,
    PromptRequest,
    RecordingBackend,
    ReplayBackend,
)
from .dataset import (
    DatasetStats,
    ManifestRow,
    apply_reviews,
    build_dataset,
    compose_variants,
    dataset_stats,
    load_decisions,
    load_manifest,
    read_records,
    record_id_for,
    training_path_for,
)
from .errors import (
    BackendError,
    BackendTimeout,
    BindFailure,
    ConfigError,
    DatasetUnreadable,
    DuplicateDisplayName,
    EmptyGraph,
    FixtureMiss,
    HttpStatusError,
    InterSceneError,
    InvalidBbox,
    MalformedResponse,
    ManifestParse,
    PipelineStageError,
    SelfLoop,
    UnknownEntity,
    UnknownRecordId,
    UnknownScene,
    UnknownSource,
    UnpairedQuestion,
    UnwritableOutput,
)
from .graph import Bbox, Edge, EdgeKind, Entity, EntityId, SceneGraph, Stage
from .parsing import ParseWarning, RawQAPair, RawTriple, parse_qa_pairs, parse_triples
from .pipeline import (
    DropRecord,
    Pipeline,
    PipelineConfig,
    PipelineTrace,
    StageRecord,
    salience,
)
from .queries import (
    CompEntry,
    GeneratedInstruction,
    QueryKind,
    generate_instructions,
    objects_of,
    relations_between,
    relations_of,
    subjects_of,
)
from .review import ReviewStore, serve
from .rewards import (
    RankedCandidate,
    RewardBreakdown,
    RewardContext,
    RewardWeights,
    disambiguation_score,
    focus_score,
    irrelevance_score,
    rank_candidates,
    score_response,
)

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "BackendTimeout",
    "Bbox",
    "BindFailure",
    "CompEntry",
    "ConfigError",
    "DatasetStats",
    "DatasetUnreadable",
    "DropRecord",
    "DuplicateDisplayName",
    "Edge",
    "EdgeKind",
    "EmptyGraph",
    "Entity",
    "EntityId",
    "FixtureMiss",
    "GeneratedInstruction",
    "GenerationBackend",
    "GenerationParams",
    "HttpBackend",
    "HttpStatusError",
    "InterSceneError",
    "InvalidBbox",
    "MalformedResponse",
    "ManifestParse",
    "ManifestRow",
    "MockBackend",
    "ParseWarning",
    "Pipeline",
    "PipelineConfig",
    "PipelineStageError",
    "PipelineTrace",
    "PromptRequest",
    "QueryKind",
    "RankedCandidate",
    "RawQAPair",
    "RawTriple",
    "RecordingBackend",
    "ReplayBackend",
    "ReviewStore",
    "RewardBreakdown",
    "RewardContext",
    "RewardWeights",
    "SceneGraph",
    "SelfLoop",
    "Stage",
    "StageRecord",
    "UnknownEntity",
    "UnknownRecordId",
    "UnknownScene",
    "UnknownSource",
    "UnpairedQuestion",
    "UnwritableOutput",
    "apply_reviews",
    "build_dataset",
    "compose_variants",
    "dataset_stats",
    "disambiguation_score",
    "focus_score",
    "generate_instructions",
    "irrelevance_score",
    "load_decisions",
    "load_manifest",
    "objects_of",
    "parse_qa_pairs",
    "parse_triples",
    "rank_candidates",
    "read_records",
    "record_id_for",
    "relations_between",
    "relations_of",
    "salience",
    "score_response",
    "serve",
    "subjects_of",
    "training_path_for",
]
