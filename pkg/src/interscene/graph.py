"""Staged scene-graph data model and the small graph algebra built on it.

A graph moves through four stages: spatial -> abstract -> interaction ->
final. Entities carry a label, optional disambiguating qualifiers, an
optional normalized bounding box, and a question-mentioned flag. Edges are
directional subject-predicate-object triples tagged spatial or interaction.

Display names (label + qualifiers) must be unique from the abstract stage
on; raw spatial extraction may legitimately contain duplicates before
disambiguation, so the spatial stage does not enforce uniqueness.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import (
    DuplicateDisplayName,
    InvalidBbox,
    SelfLoop,
    UnknownEntity,
)
from .mentions import VocabScanner, normalize_phrase

EntityId = str

Bbox = tuple[float, float, float, float]

_ID_RE = re.compile(r"^e(\d+)$")


class Stage(str, Enum):
    SPATIAL = "spatial"
    ABSTRACT = "abstract"
    INTERACTION = "interaction"
    FINAL = "final"


STAGE_ORDER = {
    Stage.SPATIAL: 0,
    Stage.ABSTRACT: 1,
    Stage.INTERACTION: 2,
    Stage.FINAL: 3,
}


class EdgeKind(str, Enum):
    SPATIAL = "spatial"
    INTERACTION = "interaction"


def validate_bbox(bbox) -> Bbox:
    """Check a normalized [x1, y1, x2, y2] box; returns it as a float tuple."""
    if bbox is None:
        raise InvalidBbox("bbox is None")
    try:
        values = tuple(float(v) for v in bbox)
    except (TypeError, ValueError):
        raise InvalidBbox(f"bbox {bbox!r} is not numeric") from None
    if len(values) != 4:
        raise InvalidBbox(f"bbox {bbox!r} must have 4 coordinates")
    x1, y1, x2, y2 = values
    if not all(0.0 <= v <= 1.0 for v in values):
        raise InvalidBbox(f"bbox {values} out of [0, 1] range")
    if not (x1 < x2 and y1 < y2):
        raise InvalidBbox(f"bbox {values} is not x1<x2, y1<y2 ordered")
    return values


@dataclass
class Entity:
    id: EntityId
    label: str
    qualifiers: tuple[str, ...] = ()
    bbox: Bbox | None = None
    question_mentioned: bool = False

    @property
    def display_name(self) -> str:
        if self.qualifiers:
            return " ".join((self.label, *self.qualifiers))
        return self.label


@dataclass(frozen=True)
class Edge:
    subject: EntityId
    predicate: str
    object: EntityId
    kind: EdgeKind
    provenance: Stage
    grounded: bool = False

    @property
    def key(self) -> tuple[EntityId, str, EntityId, EdgeKind]:
        return (self.subject, self.predicate, self.object, self.kind)


@dataclass
class SceneGraph:
    stage: Stage
    image_ref: str = ""
    question: str | None = None
    entities: dict[EntityId, Entity] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    _edge_keys: set = field(default_factory=set, repr=False)
    _next_id: int = 1

    # --- construction ---

    def _fresh_id(self) -> EntityId:
        eid = f"e{self._next_id}"
        self._next_id += 1
        return eid

    def add_entity(
        self,
        label: str,
        qualifiers=(),
        bbox=None,
        question_mentioned: bool = False,
    ) -> EntityId:
        """Add an entity; returns its id.

        Labels and qualifiers are normalized (lowercased, whitespace
        collapsed). Duplicate display names raise from the abstract stage
        on; the spatial stage allows them.
        """
        label = normalize_phrase(label)
        if not label:
            raise ValueError("entity label must be non-empty")
        quals = tuple(normalize_phrase(q) for q in qualifiers if normalize_phrase(q))
        box = validate_bbox(bbox) if bbox is not None else None
        entity = Entity(self._fresh_id(), label, quals, box, question_mentioned)
        if self.stage is not Stage.SPATIAL:
            taken = {e.display_name for e in self.entities.values()}
            if entity.display_name in taken:
                self._next_id -= 1
                raise DuplicateDisplayName(
                    f"display name {entity.display_name!r} already present at {self.stage.value} stage"
                )
        self.entities[entity.id] = entity
        return entity.id

    def add_edge(self, subject: EntityId, predicate: str, object: EntityId, kind: EdgeKind) -> bool:
        """Insert a directional edge; returns False when it already exists."""
        if subject not in self.entities:
            raise UnknownEntity(f"unknown subject entity {subject!r}")
        if object not in self.entities:
            raise UnknownEntity(f"unknown object entity {object!r}")
        if subject == object:
            raise SelfLoop(f"self loop on {self.entities[subject].display_name!r}")
        predicate = normalize_phrase(predicate)
        kind = EdgeKind(kind)
        key = (subject, predicate, object, kind)
        if key in self._edge_keys:
            return False
        grounded = (
            self.entities[subject].bbox is not None
            and self.entities[object].bbox is not None
        )
        self.edges.append(Edge(subject, predicate, object, kind, self.stage, grounded))
        self._edge_keys.add(key)
        return True

    def set_qualifiers(self, entity_id: EntityId, qualifiers) -> None:
        """Rename an entity by replacing its qualifiers; uniqueness enforced."""
        ent = self.entity(entity_id)
        quals = tuple(normalize_phrase(q) for q in qualifiers if normalize_phrase(q))
        renamed = replace(ent, qualifiers=quals)
        if self.stage is not Stage.SPATIAL:
            taken = {
                e.display_name for e in self.entities.values() if e.id != entity_id
            }
            if renamed.display_name in taken:
                raise DuplicateDisplayName(
                    f"display name {renamed.display_name!r} already present"
                )
        self.entities[entity_id] = renamed

    # --- lookup ---

    def entity(self, entity_id: EntityId) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownEntity(f"unknown entity {entity_id!r}") from None

    def display_name(self, entity_id: EntityId) -> str:
        return self.entity(entity_id).display_name

    def degree(self, entity_id: EntityId) -> int:
        """In-degree plus out-degree."""
        self.entity(entity_id)
        return sum(1 for e in self.edges if entity_id in (e.subject, e.object))

    def incident_edges(self, entity_id: EntityId) -> list[Edge]:
        self.entity(entity_id)
        return [e for e in self.edges if entity_id in (e.subject, e.object)]

    def connected_component(self, seeds) -> set[EntityId]:
        """Entities reachable from the seed set, edges taken as undirected.

        An empty seed set yields the empty set.
        """
        seeds = list(seeds)
        for s in seeds:
            self.entity(s)
        neighbors: dict[EntityId, set[EntityId]] = {}
        for e in self.edges:
            neighbors.setdefault(e.subject, set()).add(e.object)
            neighbors.setdefault(e.object, set()).add(e.subject)
        seen: set[EntityId] = set()
        frontier = list(seeds)
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(neighbors.get(node, set()) - seen)
        return seen

    def entity_vocabulary(self) -> dict[str, frozenset[EntityId]]:
        """Map of matchable phrases (display names and bare labels) to ids."""
        vocab: dict[str, set[EntityId]] = {}
        for ent in self.entities.values():
            vocab.setdefault(ent.display_name, set()).add(ent.id)
            vocab.setdefault(ent.label, set()).add(ent.id)
        return {p: frozenset(ids) for p, ids in vocab.items()}

    def entities_matching(self, text: str | None) -> set[EntityId]:
        """Entities whose display name or label occurs in the text.

        Case-insensitive longest-match: a bare label does not count when it
        only appears as part of a longer matching display name.
        """
        if not text:
            return set()
        vocab = self.entity_vocabulary()
        matched: set[EntityId] = set()
        for phrase in VocabScanner(vocab).scan(text):
            matched |= vocab[phrase]
        return matched

    def find_by_display_name(self, phrase: str) -> EntityId | None:
        want = normalize_phrase(phrase)
        for ent in self.entities.values():
            if ent.display_name == want:
                return ent.id
        return None

    # --- stage transitions ---

    def with_stage(self, stage: Stage) -> "SceneGraph":
        """Copy of this graph at another stage; ids and edges preserved."""
        return clone_filtered(self, stage)

    # --- serialization ---

    def to_payload(self) -> dict:
        entities = [
            {
                "id": ent.id,
                "label": ent.label,
                "qualifiers": list(ent.qualifiers),
                "bbox": list(ent.bbox) if ent.bbox is not None else None,
                "question_mentioned": ent.question_mentioned,
            }
            for ent in sorted(self.entities.values(), key=lambda e: e.id)
        ]
        edges = [
            {
                "subject": e.subject,
                "predicate": e.predicate,
                "object": e.object,
                "kind": e.kind.value,
                "provenance": e.provenance.value,
                "grounded": e.grounded,
            }
            for e in sorted(
                self.edges, key=lambda e: (e.subject, e.predicate, e.object, e.kind.value)
            )
        ]
        return {
            "stage": self.stage.value,
            "image_ref": self.image_ref,
            "question": self.question,
            "entities": entities,
            "edges": edges,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_payload(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_payload(cls, payload: dict) -> "SceneGraph":
        graph = cls(
            stage=Stage(payload["stage"]),
            image_ref=payload.get("image_ref", ""),
            question=payload.get("question"),
        )
        highest = 0
        for ent in payload["entities"]:
            bbox = tuple(ent["bbox"]) if ent.get("bbox") else None
            entity = Entity(
                id=ent["id"],
                label=normalize_phrase(ent["label"]),
                qualifiers=tuple(normalize_phrase(q) for q in ent.get("qualifiers", ())),
                bbox=validate_bbox(bbox) if bbox is not None else None,
                question_mentioned=bool(ent.get("question_mentioned", False)),
            )
            graph.entities[entity.id] = entity
            m = _ID_RE.match(entity.id)
            if m:
                highest = max(highest, int(m.group(1)))
        graph._next_id = max(highest + 1, len(graph.entities) + 1)
        for e in payload["edges"]:
            subject, obj = e["subject"], e["object"]
            if subject not in graph.entities or obj not in graph.entities:
                raise UnknownEntity(f"edge references unknown entity: {e}")
            if subject == obj:
                raise SelfLoop(f"edge is a self loop: {e}")
            edge = Edge(
                subject=subject,
                predicate=normalize_phrase(e["predicate"]),
                object=obj,
                kind=EdgeKind(e["kind"]),
                provenance=Stage(e.get("provenance", payload["stage"])),
                grounded=bool(e.get("grounded", False)),
            )
            if edge.key not in graph._edge_keys:
                graph.edges.append(edge)
                graph._edge_keys.add(edge.key)
        return graph

    @classmethod
    def loads(cls, text: str) -> "SceneGraph":
        return cls.from_payload(json.loads(text))


def clone_filtered(
    graph: SceneGraph,
    stage: Stage,
    keep_entities=None,
    keep_edges=None,
) -> SceneGraph:
    """Copy a graph at a (possibly new) stage, optionally dropping items.

    Entity ids, edge provenance, and the id counter are preserved, which is
    what keeps trace drop-records attributable across stages. Uniqueness of
    display names is intentionally not re-checked here: disambiguation is
    the pipeline step that resolves carried-over duplicates.
    """
    keep_e = set(graph.entities) if keep_entities is None else set(keep_entities)
    out = SceneGraph(stage=Stage(stage), image_ref=graph.image_ref, question=graph.question)
    for eid in sorted(keep_e, key=_id_sort_key):
        ent = graph.entities[eid]
        out.entities[eid] = replace(ent)
    for edge in graph.edges:
        if keep_edges is not None and edge.key not in keep_edges:
            continue
        if edge.subject in keep_e and edge.object in keep_e:
            out.edges.append(edge)
            out._edge_keys.add(edge.key)
    out._next_id = graph._next_id
    return out


def _id_sort_key(entity_id: EntityId):
    m = _ID_RE.match(entity_id)
    return (0, int(m.group(1)), entity_id) if m else (1, 0, entity_id)
