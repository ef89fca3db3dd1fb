"""Ask structured questions of a finished graph, then turn the graph into
QA training instructions.

Run with: python3 demos/query_and_instructions.py
"""

from interscene import (
    generate_instructions,
    objects_of,
    relations_between,
    relations_of,
    subjects_of,
)
from interscene.fixtures import demo_final_graph
from interscene.queries import OUTGOING


def name(g, eid):
    return g.display_name(eid)


g = demo_final_graph()
by_name = {g.display_name(eid): eid for eid in g.entities}
pb = by_name["player in black"]
f = by_name["frisbee"]

print("direct queries")
print(f"  relations between player in black and frisbee: "
      f"{sorted(relations_between(g, pb, f))}")
print(f"  what does player in black reach for: "
      f"{sorted(name(g, o) for o in objects_of(g, pb, 'reaches for'))}")
print(f"  who reaches for the frisbee: "
      f"{sorted(name(g, s) for s in subjects_of(g, 'reaches for', f))}")
print("  everything touching the frisbee:")
for entry in sorted(relations_of(g, f), key=lambda e: (e.predicate, e.entity)):
    arrow = "->" if entry.direction == OUTGOING else "<-"
    print(f"    frisbee {arrow} {entry.predicate} {arrow} {name(g, entry.entity)}")

print()
print("generated instructions")
for inst in generate_instructions(g):
    print(f"  [{inst.kind.value}]")
    print(f"  Q: {inst.question}")
    print(f"  A: {inst.answer}")
    evidence = ", ".join(
        f"{name(g, e.subject)} {e.predicate} {name(g, e.object)}" for e in inst.evidence
    )
    print(f"  evidence: {evidence}")
