"""Query operators over final graphs and template-based QA generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import EmptyGraph, UnknownEntity
from .graph import Edge, EdgeKind, EntityId, SceneGraph
from .pipeline import salience

INCOMING = "incoming"
OUTGOING = "outgoing"


class QueryKind(str, Enum):
    OBJECT_OBJECT = "object_object"
    SUBJECT_RELATION = "subject_relation"
    RELATION_OBJECT = "relation_object"
    COMPREHENSIVE = "comprehensive"


@dataclass(frozen=True)
class CompEntry:
    """One relationship incident to a queried entity.

    ``direction`` is "incoming" when the queried entity is the object of
    the underlying edge and "outgoing" when it is the subject;
    ``entity`` is always the far endpoint.
    """

    entity: EntityId
    predicate: str
    direction: str


def relations_between(g: SceneGraph, o1: EntityId, o2: EntityId) -> set[str]:
    """Predicates on directed edges from o1 to o2. Direction matters."""
    g.entity(o1)
    g.entity(o2)
    return {e.predicate for e in g.edges if e.subject == o1 and e.object == o2}


def objects_of(g: SceneGraph, s: EntityId, r: str) -> set[EntityId]:
    """Objects o with an (s, r, o) edge."""
    g.entity(s)
    r = r.strip().lower()
    return {e.object for e in g.edges if e.subject == s and e.predicate == r}


def subjects_of(g: SceneGraph, r: str, o: EntityId) -> set[EntityId]:
    """Subjects s with an (s, r, o) edge."""
    g.entity(o)
    r = r.strip().lower()
    return {e.subject for e in g.edges if e.object == o and e.predicate == r}


def relations_of(g: SceneGraph, o: EntityId) -> set[CompEntry]:
    """Every relationship touching o, tagged with its direction."""
    g.entity(o)
    out: set[CompEntry] = set()
    for e in g.edges:
        if e.object == o:
            out.add(CompEntry(e.subject, e.predicate, INCOMING))
        if e.subject == o:
            out.add(CompEntry(e.object, e.predicate, OUTGOING))
    return out


@dataclass(frozen=True)
class MentionRecord:
    """Where an entity mention appears and whether it carries coordinates."""

    phrase: str
    where: str  # "question" or "answer"
    with_coords: bool


@dataclass(frozen=True)
class GeneratedInstruction:
    kind: QueryKind
    question: str
    answer: str
    evidence: tuple[Edge, ...]
    mentions: tuple[MentionRecord, ...] = field(default=())

    def bbox_rule_ok(self) -> bool:
        """Answer mentions carry coordinates only when the same phrase
        carried none in the question."""
        asked = {m.phrase for m in self.mentions if m.where == "question" and m.with_coords}
        return not any(
            m.phrase in asked
            for m in self.mentions
            if m.where == "answer" and m.with_coords
        )


def _coords(bbox) -> str:
    return "[" + ",".join(f"{v:.2f}" for v in bbox) + "]"


def _edge_salience(g: SceneGraph, e: Edge) -> int:
    return salience(g, e.subject) + salience(g, e.object)


def _edge_sort_key(g: SceneGraph, e: Edge):
    return (
        -_edge_salience(g, e),
        g.display_name(e.subject),
        e.predicate,
        g.display_name(e.object),
    )


class _Render:
    """Accumulates mention records while building question/answer text."""

    def __init__(self, g: SceneGraph) -> None:
        self.g = g
        self.mentions: list[MentionRecord] = []

    def mention(self, entity_id: EntityId, where: str, want_coords: bool) -> str:
        ent = self.g.entity(entity_id)
        name = ent.display_name
        has = want_coords and ent.bbox is not None
        self.mentions.append(MentionRecord(name, where, has))
        return name + _coords(ent.bbox) if has else name


def _object_object(g: SceneGraph, e: Edge) -> GeneratedInstruction:
    r = _Render(g)
    q = (
        f"What is the relationship between {r.mention(e.subject, 'question', True)}"
        f" and {r.mention(e.object, 'question', True)}?"
    )
    a = f"{r.mention(e.subject, 'answer', False)} {e.predicate} {r.mention(e.object, 'answer', False)}."
    return GeneratedInstruction(QueryKind.OBJECT_OBJECT, q, a, (e,), tuple(r.mentions))


def _subject_relation(g: SceneGraph, e: Edge) -> GeneratedInstruction:
    r = _Render(g)
    q = f"What does {r.mention(e.subject, 'question', True)} {e.predicate}?"
    a = f"{r.mention(e.subject, 'answer', False)} {e.predicate} {r.mention(e.object, 'answer', True)}."
    return GeneratedInstruction(QueryKind.SUBJECT_RELATION, q, a, (e,), tuple(r.mentions))


def _relation_object(g: SceneGraph, e: Edge) -> GeneratedInstruction:
    r = _Render(g)
    q = f"What is {e.predicate} by {r.mention(e.object, 'question', True)}?"
    a = f"{r.mention(e.subject, 'answer', True)} {e.predicate} {r.mention(e.object, 'answer', False)}."
    return GeneratedInstruction(QueryKind.RELATION_OBJECT, q, a, (e,), tuple(r.mentions))


def _comprehensive(g: SceneGraph, anchor: EntityId) -> GeneratedInstruction:
    outgoing = sorted(
        (e for e in g.edges if e.subject == anchor),
        key=lambda e: (e.predicate, g.display_name(e.object)),
    )
    r = _Render(g)
    q = f"What objects have a relationship with {r.mention(anchor, 'question', True)}?"
    parts = [
        f"{e.predicate} {r.mention(e.object, 'answer', True)}" for e in outgoing
    ]
    a = f"{r.mention(anchor, 'answer', False)} " + ", ".join(parts) + "."
    return GeneratedInstruction(QueryKind.COMPREHENSIVE, q, a, tuple(outgoing), tuple(r.mentions))


def generate_instructions(g: SceneGraph) -> list[GeneratedInstruction]:
    """One instruction per query kind, phrased with the fixed templates.

    Interaction edges are the eligible pool whenever the graph has any;
    purely spatial graphs fall back to all edges. Each template takes the
    eligible edge with the highest endpoint-salience sum (lexicographic
    tie-break), so regeneration over the same graph is byte-identical.
    Templates without an eligible edge are skipped, which is why fewer
    than four may come back.
    """
    if not g.edges:
        raise EmptyGraph("cannot generate instructions for a graph with no edges")
    eligible = [e for e in g.edges if e.kind == EdgeKind.INTERACTION] or list(g.edges)
    ranked = sorted(eligible, key=lambda e: _edge_sort_key(g, e))
    best = ranked[0]
    out = [
        _object_object(g, best),
        _subject_relation(g, best),
        _relation_object(g, best),
    ]
    # The comprehensive template anchors on the chosen edge's subject; every
    # edge supplies one, so with any edge present it cannot be skipped.
    out.append(_comprehensive(g, best.subject))
    return out
