"""Staged scene-graph construction with deterministic constraint filters.

The pipeline asks a backend for spatial triples, filters the resulting
graph down to what a question cares about, asks for interactions between
the survivors, and applies the final consistency/grounding/saliency gates.
Every filter is a deterministic graph operation, so identical backend
outputs always produce identical final graphs, and every dropped item is
written to the trace with exactly one reason.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .backends import GenerationBackend, GenerationParams, PromptRequest
from .errors import EmptyGraph, InterSceneError, PipelineStageError, SelfLoop
from .graph import (
    EdgeKind,
    EntityId,
    SceneGraph,
    Stage,
    clone_filtered,
)
from .mentions import VocabScanner, normalize_phrase
from .parsing import RawTriple, parse_triples
from .prompts import render_template, serialize_triples

QUESTION_MENTION_BONUS = 2

# Filter names used as drop reasons in traces.
REASON_RELEVANCE = "relevance"
REASON_FOCUS = "focus"
REASON_UNRESOLVED = "unresolved_endpoint"
REASON_SELF_LOOP = "self_loop"
REASON_CONSISTENCY = "consistency"
REASON_GROUNDING = "grounding"
REASON_SALIENCY = "saliency"
REASON_ZERO_DEGREE = "zero_degree"


@dataclass(frozen=True)
class PipelineConfig:
    n_focus: int = 8
    m_salient: int = 6
    require_grounding: bool = False
    exclusive_predicate_sets: tuple[frozenset[str], ...] = ()
    max_refinement_rounds: int = 1
    templates_dir: str | None = None

    def __post_init__(self):
        if self.n_focus < 1:
            raise ValueError("n_focus must be >= 1")
        if self.m_salient < 1:
            raise ValueError("m_salient must be >= 1")
        if self.max_refinement_rounds < 1:
            raise ValueError("max_refinement_rounds must be >= 1")
        normalized = tuple(
            frozenset(normalize_phrase(p) for p in group)
            for group in self.exclusive_predicate_sets
        )
        object.__setattr__(self, "exclusive_predicate_sets", normalized)


@dataclass
class DropRecord:
    item: str  # "entity", "edge", or "triple"
    description: str
    reason: str

    def to_payload(self) -> dict:
        return {"item": self.item, "description": self.description, "reason": self.reason}


@dataclass
class StageRecord:
    round: int
    stage: Stage
    template_id: str | None
    prompt: str | None
    raw_output: str | None
    parsed_triples: list[tuple[str, str, str]] = field(default_factory=list)
    warnings: list[dict] = field(default_factory=list)
    drops: list[DropRecord] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "round": self.round,
            "stage": self.stage.value,
            "template_id": self.template_id,
            "prompt": self.prompt,
            "raw_output": self.raw_output,
            "parsed_triples": [list(t) for t in self.parsed_triples],
            "warnings": self.warnings,
            "drops": [d.to_payload() for d in self.drops],
        }


@dataclass
class PipelineTrace:
    records: list[StageRecord] = field(default_factory=list)
    final_graph: SceneGraph | None = None

    def to_payload(self) -> dict:
        return {
            "records": [r.to_payload() for r in self.records],
            "final_graph": self.final_graph.to_payload() if self.final_graph else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_payload(), sort_keys=True, ensure_ascii=False)

    def drop_records(self) -> list[DropRecord]:
        return [d for r in self.records for d in r.drops]


def salience(graph: SceneGraph, entity_id: EntityId) -> int:
    """Degree plus a bonus for being named in the question."""
    ent = graph.entity(entity_id)
    return graph.degree(entity_id) + (QUESTION_MENTION_BONUS if ent.question_mentioned else 0)


def _edge_text(graph: SceneGraph, edge) -> str:
    return (
        f"({graph.display_name(edge.subject)}, {edge.predicate}, "
        f"{graph.display_name(edge.object)}, {edge.kind.value})"
    )


class Pipeline:
    def __init__(
        self,
        backend: GenerationBackend,
        config: PipelineConfig | None = None,
        params: GenerationParams | None = None,
    ):
        self.backend = backend
        self.config = config or PipelineConfig()
        self.params = params or GenerationParams()

    # --- stages ---

    def build_spatial(
        self,
        image_ref: str,
        question: str | None = None,
        trace: PipelineTrace | None = None,
        round_no: int = 1,
    ) -> SceneGraph:
        """Extract the spatial graph from backend triples.

        Identical labels are merged into one entity here: raw text gives no
        way to tell two same-named mentions apart. Pre-annotated inputs
        with duplicate labels enter through the dataset path instead.
        """
        prompt = render_template(
            "spatial_init", self.config.templates_dir, image=image_ref
        )
        record = StageRecord(round_no, Stage.SPATIAL, "spatial_init", prompt, None)
        if trace is not None:
            trace.records.append(record)
        raw = self.backend.generate(
            PromptRequest("spatial_init", prompt, image_ref, self.params)
        )
        triples, warnings = parse_triples(raw)
        record.raw_output = raw
        record.parsed_triples = [t.as_tuple() for t in triples]
        record.warnings = [w.to_payload() for w in warnings]
        graph = SceneGraph(Stage.SPATIAL, image_ref=image_ref, question=question)
        by_label: dict[str, EntityId] = {}

        def entity_for(label: str) -> EntityId:
            key = normalize_phrase(label)
            if key not in by_label:
                by_label[key] = graph.add_entity(key)
            return by_label[key]

        for t in triples:
            sid = entity_for(t.subject)
            oid = entity_for(t.object)
            if sid == oid:
                record.drops.append(
                    DropRecord("triple", f"({t.subject}, {t.predicate}, {t.object})", REASON_SELF_LOOP)
                )
                continue
            graph.add_edge(sid, t.predicate, oid, EdgeKind.SPATIAL)
        if question:
            for eid in graph.entities_matching(question):
                graph.entities[eid].question_mentioned = True
        if not graph.entities:
            raise EmptyGraph(f"no entities extracted for image {image_ref!r}")
        return graph

    def abstract_graph(
        self,
        g: SceneGraph,
        image_ref: str,
        question: str | None = None,
        trace: PipelineTrace | None = None,
        round_no: int = 1,
    ) -> SceneGraph:
        """Relevance and focus filters, then unique naming.

        The abstract prompt is always sent; its parsed triples feed only the
        disambiguation step (qualified names for colliding labels). Ordinal
        suffixes cover whatever the backend does not.
        """
        if g.stage is not Stage.SPATIAL:
            raise ValueError(f"abstract_graph expects a spatial-stage graph, got {g.stage.value}")
        record = StageRecord(round_no, Stage.ABSTRACT, "abstract", None, None)
        if trace is not None:
            trace.records.append(record)
        drops = record.drops

        # Relevance: component of question-mentioned entities, with a
        # highest-degree fallback when the question names nothing.
        seeds = [e.id for e in g.entities.values() if e.question_mentioned]
        if not seeds:
            ranked = sorted(g.entities, key=lambda eid: (-g.degree(eid), _entity_order(eid)))
            seeds = ranked[:1]
        component = g.connected_component(seeds)
        for eid in sorted(g.entities, key=_entity_order):
            if eid not in component:
                drops.append(DropRecord("entity", g.display_name(eid), REASON_RELEVANCE))
        for edge in g.edges:
            if edge.subject not in component or edge.object not in component:
                drops.append(DropRecord("edge", _edge_text(g, edge), REASON_RELEVANCE))
        work = clone_filtered(g, Stage.ABSTRACT, keep_entities=component)

        # Focus: top n_focus by salience; edges losing an endpoint go too.
        ranked = sorted(
            work.entities, key=lambda eid: (-salience(work, eid), _entity_order(eid))
        )
        keep = set(ranked[: self.config.n_focus])
        for eid in ranked[self.config.n_focus:]:
            drops.append(DropRecord("entity", work.display_name(eid), REASON_FOCUS))
        for edge in work.edges:
            if edge.subject not in keep or edge.object not in keep:
                drops.append(DropRecord("edge", _edge_text(work, edge), REASON_FOCUS))
        work = clone_filtered(work, Stage.ABSTRACT, keep_entities=keep)
        if not work.entities:
            raise EmptyGraph("all entities filtered out before the abstract stage")

        # Disambiguation: ask the backend for qualified names.
        prompt = render_template(
            "abstract",
            self.config.templates_dir,
            spatial_scene_graph=serialize_triples(work),
            image=image_ref,
        )
        record.prompt = prompt
        raw = self.backend.generate(
            PromptRequest("abstract", prompt, image_ref, self.params)
        )
        triples, warnings = parse_triples(raw)
        record.raw_output = raw
        record.parsed_triples = [t.as_tuple() for t in triples]
        record.warnings = [w.to_payload() for w in warnings]
        self._disambiguate(work, triples)
        return work

    @staticmethod
    def _disambiguate(work: SceneGraph, triples: list[RawTriple]) -> None:
        """Give colliding display names unique qualifiers.

        Backend-supplied names extending the bare label ("player in black"
        for "player") are assigned to group members in id order, in order of
        first appearance in the output; members left over get ordinals
        ("player 2", "player 3", ...). The first member may keep the bare name.
        """
        groups: dict[str, list[EntityId]] = {}
        for ent in work.entities.values():
            groups.setdefault(ent.display_name, []).append(ent.id)
        collisions = {name: ids for name, ids in groups.items() if len(ids) > 1}
        if not collisions:
            return
        mentioned: list[str] = []
        for t in triples:
            for part in (t.subject, t.object):
                phrase = normalize_phrase(part)
                if phrase and phrase not in mentioned:
                    mentioned.append(phrase)

        for name, ids in sorted(collisions.items()):
            label = work.entities[ids[0]].label
            candidates = [
                p for p in mentioned if p != name and p.startswith(label + " ")
            ]
            ids = sorted(ids, key=_entity_order)
            taken = {
                e.display_name for e in work.entities.values() if e.id not in ids
            }
            for index, eid in enumerate(ids):
                new_name = None
                while candidates:
                    cand = candidates.pop(0)
                    if cand not in taken:
                        new_name = cand
                        break
                if new_name is not None:
                    qualifier = new_name[len(label):].strip()
                    work.set_qualifiers(eid, (qualifier,))
                    taken.add(new_name)
                elif index == 0 and name not in taken:
                    taken.add(name)  # first member may keep the bare name
                else:
                    ordinal = index + 1
                    while f"{name} {ordinal}" in taken:
                        ordinal += 1
                    work.set_qualifiers(eid, (*work.entities[eid].qualifiers, str(ordinal)))
                    taken.add(work.display_name(eid))

    def infer_interactions(
        self,
        g: SceneGraph,
        image_ref: str,
        question: str | None = None,
        caption_text: str | None = None,
        trace: PipelineTrace | None = None,
        round_no: int = 1,
    ) -> SceneGraph:
        """Ask the backend for interactions and add resolvable ones as edges.

        Endpoints resolve by exact display-name match. An unknown phrase
        becomes a new entity only when its label can be traced back to the
        raw spatial-stage output text: either the whole phrase occurs
        there, or a known entity label prefixes the phrase and occurs there
        (the remainder becomes a qualifier). Anything else drops the triple.
        """
        if g.stage is not Stage.ABSTRACT:
            raise ValueError(f"infer_interactions expects an abstract-stage graph, got {g.stage.value}")
        prompt = render_template(
            "interaction_knowledge",
            self.config.templates_dir,
            abstract_graph=serialize_triples(g),
            image=image_ref,
        )
        record = StageRecord(round_no, Stage.INTERACTION, "interaction_knowledge", prompt, None)
        if trace is not None:
            trace.records.append(record)
        raw = self.backend.generate(
            PromptRequest("interaction_knowledge", prompt, image_ref, self.params)
        )
        triples, warnings = parse_triples(raw)
        record.raw_output = raw
        record.parsed_triples = [t.as_tuple() for t in triples]
        record.warnings = [w.to_payload() for w in warnings]
        work = clone_filtered(g, Stage.INTERACTION)
        caption = caption_text if caption_text is not None else serialize_triples(g)
        created: list[EntityId] = []

        def resolve(phrase: str) -> EntityId | None:
            name = normalize_phrase(phrase)
            if not name:
                return None
            existing = work.find_by_display_name(name)
            if existing is not None:
                return existing
            if VocabScanner([name]).contains(caption):
                eid = work.add_entity(name)
                created.append(eid)
                return eid
            labels = sorted(
                {e.label for e in work.entities.values()}, key=len, reverse=True
            )
            for label in labels:
                if name.startswith(label + " ") and VocabScanner([label]).contains(caption):
                    qualifier = name[len(label):].strip()
                    eid = work.add_entity(label, (qualifier,))
                    created.append(eid)
                    return eid
            return None

        for t in triples:
            sid = resolve(t.subject)
            oid = resolve(t.object)
            text = f"({t.subject}, {t.predicate}, {t.object})"
            if sid is None or oid is None:
                record.drops.append(DropRecord("triple", text, REASON_UNRESOLVED))
                continue
            try:
                work.add_edge(sid, t.predicate, oid, EdgeKind.INTERACTION)
            except SelfLoop:
                record.drops.append(DropRecord("triple", text, REASON_SELF_LOOP))
        if question and created:
            matched = work.entities_matching(question)
            for eid in created:
                if eid in matched:
                    work.entities[eid].question_mentioned = True
        return work

    def finalize_graph(
        self,
        g: SceneGraph,
        trace: PipelineTrace | None = None,
        round_no: int = 1,
    ) -> SceneGraph:
        """Consistency, grounding, and saliency gates, then degree pruning."""
        if g.stage is not Stage.INTERACTION:
            raise ValueError(f"finalize_graph expects an interaction-stage graph, got {g.stage.value}")
        record = StageRecord(round_no, Stage.FINAL, None, None, None)
        if trace is not None:
            trace.records.append(record)
        # Salience snapshot from the stage-entry graph keeps ranking stable
        # while edges are being removed below.
        sal = {eid: salience(g, eid) for eid in g.entities}
        keep_keys = {e.key for e in g.edges}

        def sort_text(edge):
            return (
                g.display_name(edge.subject),
                edge.predicate,
                g.display_name(edge.object),
            )

        # Consistency: within each unordered endpoint pair, predicates from
        # one exclusive set may not coexist. Higher subject salience wins,
        # then the lexicographically smaller predicate.
        by_pair: dict[frozenset, list] = {}
        for edge in g.edges:
            if edge.kind is EdgeKind.INTERACTION and edge.key in keep_keys:
                by_pair.setdefault(frozenset((edge.subject, edge.object)), []).append(edge)
        for pair, edges in sorted(by_pair.items(), key=lambda kv: sorted(kv[0])):
            for exclusive in self.config.exclusive_predicate_sets:
                conflicted = [e for e in edges if e.predicate in exclusive and e.key in keep_keys]
                if len(conflicted) < 2:
                    continue
                conflicted.sort(key=lambda e: (-sal[e.subject], e.predicate, sort_text(e)))
                for edge in conflicted[1:]:
                    keep_keys.discard(edge.key)
                    record.drops.append(
                        DropRecord("edge", _edge_text(g, edge), REASON_CONSISTENCY)
                    )

        # Grounding: gate or mark.
        if self.config.require_grounding:
            for edge in g.edges:
                if (
                    edge.kind is EdgeKind.INTERACTION
                    and edge.key in keep_keys
                    and not edge.grounded
                ):
                    keep_keys.discard(edge.key)
                    record.drops.append(
                        DropRecord("edge", _edge_text(g, edge), REASON_GROUNDING)
                    )

        # Saliency: top m interaction edges by endpoint-salience sum.
        interaction = [
            e for e in g.edges if e.kind is EdgeKind.INTERACTION and e.key in keep_keys
        ]
        interaction.sort(key=lambda e: (-(sal[e.subject] + sal[e.object]), sort_text(e)))
        for edge in interaction[self.config.m_salient:]:
            keep_keys.discard(edge.key)
            record.drops.append(DropRecord("edge", _edge_text(g, edge), REASON_SALIENCY))

        # Prune entities that no surviving edge touches.
        used: set[EntityId] = set()
        for edge in g.edges:
            if edge.key in keep_keys:
                used.add(edge.subject)
                used.add(edge.object)
        for eid in sorted(g.entities, key=_entity_order):
            if eid not in used:
                record.drops.append(
                    DropRecord("entity", g.display_name(eid), REASON_ZERO_DEGREE)
                )
        final = clone_filtered(g, Stage.FINAL, keep_entities=used, keep_edges=keep_keys)
        if not any(e.kind is EdgeKind.INTERACTION for e in final.edges):
            raise EmptyGraph("no interaction edges survived the final filters")
        return final

    # --- orchestration ---

    def run(
        self,
        image_ref: str,
        question: str | None = None,
        spatial_graph: SceneGraph | None = None,
    ) -> tuple[SceneGraph, PipelineTrace]:
        """Full staged construction with I_max refinement rounds.

        Rounds past the first feed the final graph back in as the abstract
        input and re-run the interaction and final stages. A pre-annotated
        spatial graph skips text extraction for the first stage.
        """
        trace = PipelineTrace()
        stage_name = Stage.SPATIAL.value
        try:
            if spatial_graph is not None:
                if spatial_graph.stage is not Stage.SPATIAL:
                    raise ValueError("spatial_graph must be at the spatial stage")
                g_s = clone_filtered(spatial_graph, Stage.SPATIAL)
                g_s.image_ref = image_ref
                g_s.question = question
                if question:
                    for eid in g_s.entities_matching(question):
                        g_s.entities[eid].question_mentioned = True
                caption = serialize_triples(g_s) or "\n".join(
                    sorted(e.display_name for e in g_s.entities.values())
                )
                trace.records.append(
                    StageRecord(1, Stage.SPATIAL, None, None, None)
                )
            else:
                g_s = self.build_spatial(image_ref, question, trace, round_no=1)
                caption = trace.records[-1].raw_output or ""
            stage_name = Stage.ABSTRACT.value
            g_a = self.abstract_graph(g_s, image_ref, question, trace, round_no=1)
            stage_name = Stage.INTERACTION.value
            g_t = self.infer_interactions(
                g_a, image_ref, question, caption_text=caption, trace=trace, round_no=1
            )
            stage_name = Stage.FINAL.value
            g_f = self.finalize_graph(g_t, trace, round_no=1)
            for round_no in range(2, self.config.max_refinement_rounds + 1):
                stage_name = Stage.INTERACTION.value
                fed_back = g_f.with_stage(Stage.ABSTRACT)
                g_t = self.infer_interactions(
                    fed_back, image_ref, question,
                    caption_text=caption, trace=trace, round_no=round_no,
                )
                stage_name = Stage.FINAL.value
                g_f = self.finalize_graph(g_t, trace, round_no=round_no)
            trace.final_graph = g_f
            return g_f, trace
        except InterSceneError as exc:
            raise PipelineStageError(stage_name, exc, trace) from exc


def _entity_order(entity_id: EntityId):
    from .graph import _id_sort_key

    return _id_sort_key(entity_id)
