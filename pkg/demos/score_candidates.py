"""Rank a group of candidate answers against a scene graph.

The scoring rewards answers that name the question's entities, refer to
them unambiguously, and stay inside the part of the graph the question is
about. Advantages are the group-standardized totals, so they sum to zero.

Run with: python3 demos/score_candidates.py
"""

from interscene import RewardContext, rank_candidates
from interscene.fixtures import FRISBEE_PARK, demo_final_graph

graph = demo_final_graph()
ctx = RewardContext(graph, FRISBEE_PARK.question)
candidates = list(FRISBEE_PARK.qa_candidates)

print(f"question: {FRISBEE_PARK.question}")
print()
for rank, row in enumerate(rank_candidates(candidates, ctx), start=1):
    b = row.breakdown
    print(f"#{rank}  candidate[{row.index}]  total={b.total:+.3f}  "
          f"advantage={row.advantage:+.3f}")
    print(f"    focus={b.focus:.2f} disamb={b.disamb:.2f} rele={b.rele:.2f}")
    print(f"    {candidates[row.index]!r}")
