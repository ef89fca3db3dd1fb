"""Constraint-derived reward scoring and candidate group ranking."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from interscene import (
    EdgeKind,
    RewardContext,
    RewardWeights,
    SceneGraph,
    Stage,
    UnknownEntity,
    disambiguation_score,
    focus_score,
    irrelevance_score,
    rank_candidates,
    score_response,
)
from interscene.fixtures import FRISBEE_PARK, demo_final_graph


def two_player_graph() -> SceneGraph:
    g = SceneGraph(Stage.FINAL, image_ref="img", question="Who will catch the frisbee?")
    black = g.add_entity("player", ("in black",))
    white = g.add_entity("player", ("in white",))
    frisbee = g.add_entity("frisbee")
    grass = g.add_entity("grass")
    tree = g.add_entity("tree")
    bench = g.add_entity("bench")
    g.add_edge(black, "reaches for", frisbee, EdgeKind.INTERACTION)
    g.add_edge(white, "jumps to", frisbee, EdgeKind.INTERACTION)
    g.add_edge(frisbee, "on", grass, EdgeKind.SPATIAL)
    g.add_edge(tree, "near", bench, EdgeKind.SPATIAL)
    return g


@pytest.fixture
def ctx():
    g = two_player_graph()
    return RewardContext(g, "Who will catch the frisbee?")


class TestWeights:
    def test_defaults(self):
        w = RewardWeights()
        assert (w.focus_weight, w.disamb_weight, w.irrelevance_weight) == (0.4, 0.4, 0.2)
        assert w.exact_match_bonus == 0.0

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            RewardWeights(focus_weight=-0.1)
        with pytest.raises(ValueError):
            RewardWeights(exact_match_bonus=-1)


class TestContext:
    def test_question_entities_detected(self, ctx):
        names = {ctx.graph.display_name(e) for e in ctx.question_entities}
        assert names == {"frisbee"}

    def test_relevance_component_excludes_disconnected(self, ctx):
        comp_names = {ctx.graph.display_name(e) for e in ctx.relevance_component}
        assert comp_names == {"player in black", "player in white", "frisbee", "grass"}

    def test_no_question_makes_everything_relevant(self):
        g = two_player_graph()
        open_ctx = RewardContext(g, None)
        assert open_ctx.relevance_component == frozenset(g.entities)

    def test_explicit_question_entities_validated(self):
        g = two_player_graph()
        with pytest.raises(UnknownEntity):
            RewardContext(g, "q", question_entities=frozenset({"e99"}))

    def test_longest_match_resolution(self, ctx):
        mentions = ctx.entity_mentions("player in black reaches for frisbee.")
        assert [len(ids) for ids in mentions] == [1, 1]

    def test_bare_label_is_ambiguous(self, ctx):
        mentions = ctx.entity_mentions("the player runs.")
        assert len(mentions) == 1
        assert len(mentions[0]) == 2


class TestFocus:
    def test_full_credit_when_question_entity_named(self, ctx):
        assert focus_score("player in black reaches for frisbee.", ctx) == 1.0

    def test_zero_when_question_entity_missing(self, ctx):
        assert focus_score("tree near bench.", ctx) == 0.0

    def test_vacuous_without_question_entities(self):
        g = two_player_graph()
        open_ctx = RewardContext(g, "What is happening?")
        assert focus_score("anything at all", open_ctx) == 1.0

    def test_qualified_mention_still_counts_for_bare_label_entity(self):
        g = SceneGraph(Stage.FINAL, image_ref="img")
        player = g.add_entity("player")
        ball = g.add_entity("ball")
        g.add_edge(player, "kicks", ball, EdgeKind.INTERACTION)
        c = RewardContext(g, "Where is the player?")
        # "player in black" contains the phrase "player".
        assert focus_score("player in black kicks ball.", c) == 1.0


class TestDisambiguation:
    def test_all_mentions_unique(self, ctx):
        assert disambiguation_score("player in black reaches for frisbee.", ctx) == 1.0

    def test_ambiguous_bare_label_halves_score(self, ctx):
        assert disambiguation_score("the player reaches for frisbee.", ctx) == 0.5

    def test_no_entity_mentions_scores_zero(self, ctx):
        assert disambiguation_score("yes.", ctx) == 0.0


class TestIrrelevance:
    def test_on_component_response_is_clean(self, ctx):
        assert irrelevance_score("player in black reaches for frisbee.", ctx) == 0.0

    def test_off_component_entities_penalized(self, ctx):
        assert irrelevance_score("tree near bench.", ctx) == 1.0

    def test_mixed_response_is_fractional(self, ctx):
        # frisbee in component; tree out; "near" only occurs off-component.
        score = irrelevance_score("frisbee near tree.", ctx)
        assert math.isclose(score, 2 / 3)

    def test_no_mentions_scores_zero(self, ctx):
        assert irrelevance_score("yes.", ctx) == 0.0

    def test_predicate_relevant_when_any_in_component_edge_uses_it(self):
        g = two_player_graph()
        # Add an in-component edge reusing the off-component predicate.
        black = next(i for i in g.entities if g.display_name(i) == "player in black")
        frisbee = next(i for i in g.entities if g.display_name(i) == "frisbee")
        g.add_edge(black, "near", frisbee, EdgeKind.SPATIAL)
        c = RewardContext(g, "Who will catch the frisbee?")
        assert irrelevance_score("frisbee near grass.", c) == 0.0


class TestScoreResponse:
    def test_default_weighting(self, ctx):
        b = score_response("player in black reaches for frisbee.", ctx)
        assert (b.focus, b.disamb, b.rele) == (1.0, 1.0, 0.0)
        assert math.isclose(b.total, 0.8)

    def test_lower_bound_reached_by_pure_irrelevance(self, ctx):
        b = score_response("near.", ctx)
        assert (b.focus, b.disamb, b.rele) == (0.0, 0.0, 1.0)
        assert math.isclose(b.total, -0.2)

    def test_exact_match_bonus_only_on_exact_match(self):
        g = two_player_graph()
        c = RewardContext(
            g,
            "Who will catch the frisbee?",
            reference_answer="Player in black reaches for frisbee.",
        )
        w = RewardWeights(exact_match_bonus=0.5)
        hit = score_response("player in black  reaches for frisbee.", c, w)
        assert hit.bonus == 0.5
        miss = score_response("player in white jumps to frisbee.", c, w)
        assert miss.bonus == 0.0
        assert math.isclose(hit.total - miss.total, 0.5)

    def test_weight_linearity(self, ctx):
        text = "the player reaches for frisbee."
        base = score_response(text, ctx)
        doubled = score_response(text, ctx, RewardWeights(0.8, 0.8, 0.4))
        assert math.isclose(doubled.total, 2 * base.total)

    @given(st.text(max_size=80))
    @settings(max_examples=120, deadline=None)
    def test_total_stays_in_bounds(self, text):
        g = two_player_graph()
        c = RewardContext(g, "Who will catch the frisbee?")
        b = score_response(text, c)
        assert -0.2 - 1e-12 <= b.total <= 0.8 + 1e-12
        for part in (b.focus, b.disamb, b.rele):
            assert 0.0 <= part <= 1.0


class TestRanking:
    def test_empty_group_rejected(self, ctx):
        with pytest.raises(ValueError):
            rank_candidates([], ctx)

    def test_frozen_frisbee_group(self):
        g = demo_final_graph()
        c = RewardContext(g, FRISBEE_PARK.question)
        ranked = rank_candidates(list(FRISBEE_PARK.qa_candidates), c)
        assert [r.index for r in ranked] == [1, 0, 3, 2]
        totals = [r.breakdown.total for r in ranked]
        assert totals == sorted(totals, reverse=True)
        by_index = sorted(ranked, key=lambda r: r.index)
        assert [round(r.breakdown.total, 6) for r in by_index] == [0.6, 0.8, 0.0, 0.4]

    def test_advantage_sums_to_zero(self):
        g = demo_final_graph()
        c = RewardContext(g, FRISBEE_PARK.question)
        ranked = rank_candidates(list(FRISBEE_PARK.qa_candidates), c)
        assert abs(sum(r.advantage for r in ranked)) < 1e-9

    def test_single_candidate_advantage_is_exactly_zero(self, ctx):
        ranked = rank_candidates(["player in black reaches for frisbee."], ctx)
        assert len(ranked) == 1
        assert ranked[0].advantage == 0.0

    def test_two_candidates_get_symmetric_advantages(self, ctx):
        ranked = rank_candidates(
            ["player in black reaches for frisbee.", "tree near bench."], ctx
        )
        a, b = ranked[0].advantage, ranked[1].advantage
        assert a > 0 > b
        assert math.isclose(a, -b)

    def test_ties_break_by_original_index(self, ctx):
        ranked = rank_candidates(["yes.", "no.", "maybe."], ctx)
        assert [r.index for r in ranked] == [0, 1, 2]
        assert all(r.advantage == 0.0 for r in ranked)
