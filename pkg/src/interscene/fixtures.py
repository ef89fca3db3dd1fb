"""Built-in synthetic scenes for the mock backend plus demo corpus helpers.

Each scene scripts what the mock model "sees": spatial triples, the
disambiguated names it would produce for the abstract prompt, interaction
triples, and a pool of candidate answers of varying quality for ranking
demos. Scenes are keyed by image_ref.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .graph import SceneGraph, Stage, EdgeKind

Triple = tuple[str, str, str]


@dataclass(frozen=True)
class SceneSpec:
    ref: str
    question: str | None
    spatial_triples: tuple[Triple, ...]
    abstract_triples: tuple[Triple, ...]
    interaction_triples: tuple[Triple, ...]
    qa_candidates: tuple[str, ...] = ()
    # Optional pre-annotated entities: (label, qualifiers, bbox). Used to
    # build a spatial graph directly, bypassing text extraction.
    annotated_entities: tuple[tuple[str, tuple[str, ...], tuple[float, float, float, float] | None], ...] = ()
    annotated_edges: tuple[tuple[int, str, int], ...] = ()  # indexes into annotated_entities

    def with_ref(self, ref: str) -> "SceneSpec":
        return SceneSpec(
            ref,
            self.question,
            self.spatial_triples,
            self.abstract_triples,
            self.interaction_triples,
            self.qa_candidates,
            self.annotated_entities,
            self.annotated_edges,
        )


FRISBEE_PARK = SceneSpec(
    ref="frisbee_park",
    question="Who will catch the frisbee?",
    spatial_triples=(
        ("building", "behind", "trees"),
        ("frisbee", "on", "grass"),
        ("player", "near", "frisbee"),
        ("player", "on", "grass"),
    ),
    abstract_triples=(
        ("frisbee", "on", "grass"),
        ("player", "near", "frisbee"),
        ("player", "on", "grass"),
    ),
    interaction_triples=(
        ("player in black", "reaches for", "frisbee"),
        ("player in white", "jumps to", "frisbee"),
        ("player in red hat", "looking at", "frisbee"),
        ("player in red hat", "reaches for", "frisbee"),
        ("player in red hat", "grabs at", "frisbee"),
        ("player in white", "collides", "player in black"),
        ("referee", "watches", "frisbee"),
    ),
    qa_candidates=(
        "the player reaches for frisbee.",
        "player in black reaches for frisbee.",
        "building behind trees.",
        "grass.",
    ),
)

SOCCER_MATCH = SceneSpec(
    ref="soccer_match",
    question="Who is trying to catch the ball?",
    spatial_triples=(
        ("goalkeeper", "near", "goal"),
        ("ball", "on", "grass"),
        ("goalkeeper", "near", "ball"),
    ),
    abstract_triples=(
        ("goalkeeper", "near", "goal"),
        ("ball", "on", "grass"),
        ("goalkeeper", "near", "ball"),
    ),
    interaction_triples=(
        ("goalkeeper", "catching", "ball"),
        ("striker", "looking at", "ball"),
    ),
    qa_candidates=(
        "goalkeeper catching ball.",
        "the ball is on the grass.",
    ),
)

DESK_SCENE = SceneSpec(
    ref="desk_scene",
    question=None,
    spatial_triples=(
        ("person", "on", "chair"),
        ("table", "next to", "chair"),
        ("book", "on", "table"),
    ),
    abstract_triples=(
        ("person", "on", "chair"),
        ("table", "next to", "chair"),
        ("book", "on", "table"),
    ),
    interaction_triples=(
        ("person", "sitting on", "chair"),
        ("person", "reading", "book"),
    ),
    qa_candidates=(
        "person reading book.",
        "person sitting on chair.",
    ),
)

FRISBEE_ANNOTATED = SceneSpec(
    ref="frisbee_annotated",
    question="Who will catch the frisbee?",
    spatial_triples=(),
    abstract_triples=(
        ("player in black", "near", "frisbee"),
        ("player in white", "near", "frisbee"),
        ("frisbee", "on", "grass"),
    ),
    interaction_triples=(
        ("player in black", "reaches for", "frisbee"),
        ("player in white", "jumps to", "frisbee"),
    ),
    qa_candidates=(
        "player in black reaches for frisbee.",
        "the player jumps.",
    ),
    annotated_entities=(
        ("player", (), (0.10, 0.20, 0.30, 0.90)),
        ("player", (), (0.55, 0.15, 0.75, 0.85)),
        ("frisbee", (), (0.40, 0.05, 0.50, 0.18)),
        ("grass", (), (0.00, 0.60, 1.00, 1.00)),
    ),
    annotated_edges=(
        (0, "near", 2),
        (1, "near", 2),
        (2, "on", 3),
    ),
)


def default_scenes() -> dict[str, SceneSpec]:
    scenes = (FRISBEE_PARK, SOCCER_MATCH, DESK_SCENE, FRISBEE_ANNOTATED)
    return {s.ref: s for s in scenes}


def annotated_spatial_graph(scene: SceneSpec) -> SceneGraph:
    """Build the pre-annotated spatial graph a manifest row would carry."""
    graph = SceneGraph(Stage.SPATIAL, image_ref=scene.ref, question=scene.question)
    ids = []
    for label, qualifiers, bbox in scene.annotated_entities:
        ids.append(graph.add_entity(label, qualifiers, bbox))
    for si, predicate, oi in scene.annotated_edges:
        graph.add_edge(ids[si], predicate, ids[oi], EdgeKind.SPATIAL)
    if scene.question:
        for eid in graph.entities_matching(scene.question):
            graph.entities[eid].question_mentioned = True
    return graph


def demo_final_graph() -> SceneGraph:
    """A small grounded final-stage graph for query and reward demos.

    Two players reach for a frisbee on grass; a tree/bench pair sits in a
    disconnected component so irrelevance scoring has something to flag.
    """
    g = SceneGraph(Stage.FINAL, image_ref="frisbee_annotated", question="Who will catch the frisbee?")
    black = g.add_entity("player", ("in black",), (0.10, 0.20, 0.30, 0.90))
    white = g.add_entity("player", ("in white",), (0.55, 0.15, 0.75, 0.85))
    frisbee = g.add_entity("frisbee", (), (0.40, 0.05, 0.50, 0.18), question_mentioned=True)
    grass = g.add_entity("grass", (), (0.00, 0.60, 1.00, 1.00))
    tree = g.add_entity("tree")
    bench = g.add_entity("bench")
    g.add_edge(frisbee, "on", grass, EdgeKind.SPATIAL)
    g.add_edge(black, "reaches for", frisbee, EdgeKind.INTERACTION)
    g.add_edge(white, "jumps to", frisbee, EdgeKind.INTERACTION)
    g.add_edge(tree, "near", bench, EdgeKind.SPATIAL)
    return g


def demo_scenes(n: int = 10) -> dict[str, SceneSpec]:
    """n distinct image_refs cycling over the built-in scene content."""
    bases = (FRISBEE_PARK, SOCCER_MATCH, DESK_SCENE, FRISBEE_ANNOTATED)
    scenes: dict[str, SceneSpec] = {}
    for i in range(n):
        base = bases[i % len(bases)]
        ref = base.ref if i < len(bases) else f"{base.ref}_{i // len(bases) + 1}"
        scenes[ref] = base.with_ref(ref)
    return scenes


def make_demo_manifest(path: str | Path, n: int = 10, include_failure: bool = False) -> dict[str, SceneSpec]:
    """Write a JSONL corpus manifest over demo scenes; returns the scenes.

    Rows for annotated scenes carry their spatial graph inline. With
    include_failure, one extra row references an image no scene defines,
    which exercises per-row failure isolation.
    """
    scenes = demo_scenes(n)
    rows = []
    for ref, scene in scenes.items():
        row = {"image_ref": ref, "question": scene.question, "source_tag": "demo"}
        if scene.annotated_entities:
            row["spatial_graph"] = annotated_spatial_graph(scene).to_payload()
        rows.append(row)
    if include_failure:
        rows.append({"image_ref": "missing_image", "question": None, "source_tag": "demo"})
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
    return scenes


def load_scenes_file(path: str | Path) -> dict[str, SceneSpec]:
    """Read a scenes JSON file: {ref: {question, spatial_triples, ...}}."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenes file {path}: {exc}") from exc
    scenes = {}
    for ref, spec in data.items():
        scenes[ref] = SceneSpec(
            ref=ref,
            question=spec.get("question"),
            spatial_triples=tuple(tuple(t) for t in spec.get("spatial_triples", ())),
            abstract_triples=tuple(tuple(t) for t in spec.get("abstract_triples", ())),
            interaction_triples=tuple(tuple(t) for t in spec.get("interaction_triples", ())),
            qa_candidates=tuple(spec.get("qa_candidates", ())),
        )
    return scenes
