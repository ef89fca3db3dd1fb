"""Relational reward scoring and group ranking for candidate answers.

The three components are mention-level: answer text is matched against the
final graph's entity and predicate vocabulary, and scored for coverage of
the question's entities, for unambiguous naming, and for drift outside the
question's connected component.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .graph import EntityId, SceneGraph
from .mentions import VocabScanner, normalize_phrase

_STD_EPS = 1e-8


@dataclass(frozen=True)
class RewardWeights:
    focus_weight: float = 0.4
    disamb_weight: float = 0.4
    irrelevance_weight: float = 0.2
    exact_match_bonus: float = 0.0

    def __post_init__(self) -> None:
        for name in ("focus_weight", "disamb_weight", "irrelevance_weight", "exact_match_bonus"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value < 0:
                raise ValueError(f"{name} must be a non-negative number, got {value!r}")


class RewardContext:
    """Everything needed to score one candidate answer.

    Precomputes the question's entity set, the relevance component, and the
    graph-vocabulary scanners so a K-candidate group shares the setup work.
    """

    def __init__(
        self,
        graph: SceneGraph,
        question: str | None,
        reference_answer: str | None = None,
        question_entities: frozenset[EntityId] | None = None,
    ) -> None:
        self.graph = graph
        self.question = question
        self.reference_answer = reference_answer
        if question_entities is None:
            question_entities = frozenset(graph.entities_matching(question))
        else:
            question_entities = frozenset(question_entities)
            for eid in question_entities:
                graph.entity(eid)
        self.question_entities = question_entities

        # Without question anchors everything counts as relevant.
        if question_entities:
            self.relevance_component = frozenset(graph.connected_component(question_entities))
        else:
            self.relevance_component = frozenset(graph.entities)

        self._vocab = graph.entity_vocabulary()
        self._entity_scanner = VocabScanner(self._vocab)
        self._predicates: dict[str, bool] = {}
        for e in graph.edges:
            inside = (
                e.subject in self.relevance_component
                and e.object in self.relevance_component
            )
            self._predicates[e.predicate] = self._predicates.get(e.predicate, False) or inside
        self._predicate_scanner = VocabScanner(self._predicates)
        self._per_entity = {
            eid: VocabScanner((graph.entity(eid).display_name, graph.entity(eid).label))
            for eid in question_entities
        }

    def entity_mentions(self, text: str) -> list[frozenset[EntityId]]:
        """Resolved id sets for each entity mention, in reading order."""
        return [self._vocab[p] for p in self._entity_scanner.scan(text)]

    def predicate_mentions(self, text: str) -> list[str]:
        return self._predicate_scanner.scan(text)

    def predicate_in_component(self, predicate: str) -> bool:
        return self._predicates.get(predicate, False)

    def mentions_entity(self, text: str, entity_id: EntityId) -> bool:
        return self._per_entity[entity_id].contains(text)


@dataclass(frozen=True)
class RewardBreakdown:
    focus: float
    disamb: float
    rele: float
    total: float
    bonus: float = 0.0

    def to_payload(self) -> dict:
        return {
            "focus": self.focus,
            "disamb": self.disamb,
            "rele": self.rele,
            "total": self.total,
        }


def focus_score(response: str, ctx: RewardContext) -> float:
    """Fraction of the question's entities named in the response.

    A question with no graph entities puts no constraint on focus, so the
    score is vacuously 1.
    """
    if not ctx.question_entities:
        return 1.0
    hit = sum(1 for eid in ctx.question_entities if ctx.mentions_entity(response, eid))
    return hit / len(ctx.question_entities)


def disambiguation_score(response: str, ctx: RewardContext) -> float:
    """Fraction of entity mentions that resolve to exactly one entity."""
    mentions = ctx.entity_mentions(response)
    if not mentions:
        return 0.0
    unique = sum(1 for ids in mentions if len(ids) == 1)
    return unique / len(mentions)


def irrelevance_score(response: str, ctx: RewardContext) -> float:
    """Fraction of entity and predicate mentions outside the question's
    connected component."""
    total = 0
    off = 0
    for ids in ctx.entity_mentions(response):
        total += 1
        if not ids & ctx.relevance_component:
            off += 1
    for predicate in ctx.predicate_mentions(response):
        total += 1
        if not ctx.predicate_in_component(predicate):
            off += 1
    if total == 0:
        return 0.0
    return off / total


def score_response(
    response: str,
    ctx: RewardContext,
    weights: RewardWeights | None = None,
) -> RewardBreakdown:
    w = weights or RewardWeights()
    focus = focus_score(response, ctx)
    disamb = disambiguation_score(response, ctx)
    rele = irrelevance_score(response, ctx)
    bonus = 0.0
    if (
        w.exact_match_bonus
        and ctx.reference_answer is not None
        and normalize_phrase(response) == normalize_phrase(ctx.reference_answer)
    ):
        bonus = w.exact_match_bonus
    total = (
        w.focus_weight * focus
        + w.disamb_weight * disamb
        - w.irrelevance_weight * rele
        + bonus
    )
    return RewardBreakdown(focus, disamb, rele, total, bonus)


@dataclass(frozen=True)
class RankedCandidate:
    index: int
    breakdown: RewardBreakdown
    advantage: float


def rank_candidates(
    responses: list[str],
    ctx: RewardContext,
    weights: RewardWeights | None = None,
) -> list[RankedCandidate]:
    """Score a candidate group and sort it best-first.

    The advantage standardizes each total against the group (population
    standard deviation, epsilon-guarded), so a single-candidate group gets
    exactly zero.
    """
    if not responses:
        raise ValueError("candidate group must contain at least one response")
    scored = [score_response(text, ctx, weights) for text in responses]
    totals = [b.total for b in scored]
    mean = statistics.fmean(totals)
    spread = statistics.pstdev(totals)
    ranked = [
        RankedCandidate(i, scored[i], (totals[i] - mean) / (spread + _STD_EPS))
        for i in range(len(responses))
    ]
    ranked.sort(key=lambda c: (-c.breakdown.total, c.index))
    return ranked
