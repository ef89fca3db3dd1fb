#!/usr/bin/env python3
"""End-to-end dataset flow: build instruction records for a small image
corpus, reject a couple of them the way a reviewer would, and emit the
training file."""

import json
import tempfile
from pathlib import Path

from interscene import (
    GenerationParams,
    MockBackend,
    Pipeline,
    PipelineConfig,
    apply_reviews,
    build_dataset,
    load_manifest,
    read_records,
    training_path_for,
)
from interscene.fixtures import make_demo_manifest

workdir = Path(tempfile.mkdtemp(prefix="interscene-demo-"))
manifest_path = workdir / "manifest.jsonl"
dataset_path = workdir / "records.jsonl"

scenes = make_demo_manifest(manifest_path, n=10)
rows = load_manifest(manifest_path)

pipeline = Pipeline(
    MockBackend(scenes, seed=0),
    PipelineConfig(exclusive_predicate_sets=(("reaches for", "grabs at"),)),
    GenerationParams(seed=0),
)

stats = build_dataset(rows, pipeline, dataset_path, parallelism=3)
print(f"built {stats.records_emitted} records from {stats.rows_processed} images "
      f"-> {dataset_path}")

records = read_records(dataset_path)
histogram = {}
for r in records:
    histogram[r["kind"]] = histogram.get(r["kind"], 0) + 1
for kind, count in sorted(histogram.items()):
    print(f"  {kind}: {count}")

# A reviewer looks at two records and rejects them. Decisions are a plain
# JSONL log; applying the same log twice changes nothing.
log_path = workdir / "reviews.jsonl"
with log_path.open("w") as fh:
    for record in (records[3], records[17]):
        fh.write(json.dumps({"record_id": record["record_id"], "decision": "reject"}) + "\n")

review = apply_reviews(dataset_path, log_path)
print(f"\nreviews applied: {review.rejected} rejected of {review.total}")
print(f"training file {training_path_for(dataset_path).name}: "
      f"{review.training_records} records")
