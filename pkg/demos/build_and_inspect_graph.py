"""Build a scene graph for the bundled frisbee-park scene and walk through
what each stage kept and why.

Run with: python3 demos/build_and_inspect_graph.py
"""

from interscene import EdgeKind, GenerationParams, MockBackend, Pipeline, PipelineConfig
from interscene.fixtures import FRISBEE_PARK

pipe = Pipeline(
    MockBackend(seed=0),
    PipelineConfig(exclusive_predicate_sets=(("reaches for", "grabs at"),)),
    GenerationParams(seed=0),
)

final, trace = pipe.run(FRISBEE_PARK.ref, question=FRISBEE_PARK.question)

print(f"image:    {FRISBEE_PARK.ref}")
print(f"question: {FRISBEE_PARK.question}")
print()

# One record per stage call, in execution order.
for record in trace.records:
    print(f"[round {record.round}] {record.stage.value}: "
          f"{len(record.parsed_triples)} triples parsed, {len(record.drops)} drops")
    for drop in record.drops:
        print(f"    dropped {drop.item} {drop.description!r}: {drop.reason}")

print()
print("final graph:")
for eid in final.entities:
    ent = final.entity(eid)
    marks = []
    if ent.question_mentioned:
        marks.append("question")
    if ent.bbox is not None:
        marks.append("grounded")
    suffix = f"  ({', '.join(marks)})" if marks else ""
    print(f"  {eid}: {ent.display_name}{suffix}")

for edge in final.edges:
    kind = "interacts" if edge.kind is EdgeKind.INTERACTION else "spatial"
    print(f"  {final.display_name(edge.subject)} --{edge.predicate}--> "
          f"{final.display_name(edge.object)}  [{kind}]")
