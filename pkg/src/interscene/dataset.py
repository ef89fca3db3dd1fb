"""Corpus-scale dataset builder and review-decision merge.

Builds instruction records by running the staged pipeline over an image
manifest, keeps per-row failures out of the corpus, and folds reviewer
decisions back into the emitted files. All files are JSON lines with
sorted keys so identical inputs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DatasetUnreadable,
    InterSceneError,
    ManifestParse,
    UnknownRecordId,
    UnknownSource,
    UnwritableOutput,
)
from .graph import SceneGraph
from .pipeline import Pipeline
from .queries import generate_instructions

REVIEW_UNREVIEWED = "unreviewed"
REVIEW_ACCEPTED = "accepted"
REVIEW_REJECTED = "rejected"
REVIEW_EDITED = "edited"

_STATUSES = (REVIEW_UNREVIEWED, REVIEW_ACCEPTED, REVIEW_REJECTED, REVIEW_EDITED)
_DECISIONS = ("accept", "reject", "edit")


def record_id_for(image_ref: str, question: str, answer: str) -> str:
    digest = hashlib.sha256(
        "\n".join((image_ref, question, answer)).encode("utf-8")
    ).hexdigest()
    return digest[:16]


@dataclass
class ManifestRow:
    image_ref: str
    source_tag: str
    question: str | None = None
    spatial_graph: SceneGraph | None = None

    def to_payload(self) -> dict:
        payload: dict = {"image_ref": self.image_ref, "source_tag": self.source_tag}
        if self.question is not None:
            payload["question"] = self.question
        if self.spatial_graph is not None:
            payload["spatial_graph"] = self.spatial_graph.to_payload()
        return payload


def load_manifest(path: str | Path) -> list[ManifestRow]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestParse(f"cannot read manifest {path}: {exc}") from exc
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestParse(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ManifestParse(f"{path}:{lineno}: manifest row must be an object")
        image_ref = obj.get("image_ref")
        source_tag = obj.get("source_tag")
        if not image_ref or not isinstance(image_ref, str):
            raise ManifestParse(f"{path}:{lineno}: missing image_ref")
        if not source_tag or not isinstance(source_tag, str):
            raise ManifestParse(f"{path}:{lineno}: missing source_tag")
        if image_ref in seen:
            raise ManifestParse(f"{path}:{lineno}: duplicate image_ref {image_ref!r}")
        seen.add(image_ref)
        spatial = None
        if obj.get("spatial_graph") is not None:
            try:
                spatial = SceneGraph.from_payload(obj["spatial_graph"])
            except (InterSceneError, KeyError, TypeError, ValueError) as exc:
                raise ManifestParse(
                    f"{path}:{lineno}: bad spatial_graph: {exc}"
                ) from exc
        rows.append(
            ManifestRow(
                image_ref=image_ref,
                source_tag=source_tag,
                question=obj.get("question"),
                spatial_graph=spatial,
            )
        )
    return rows


@dataclass
class DatasetStats:
    rows_processed: int = 0
    rows_failed: int = 0
    records_emitted: int = 0
    records_deduped: int = 0
    kinds: dict = field(default_factory=dict)
    predicates: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "rows_processed": self.rows_processed,
            "rows_failed": self.rows_failed,
            "records_emitted": self.records_emitted,
            "records_deduped": self.records_deduped,
            "kinds": dict(sorted(self.kinds.items())),
            "predicates": dict(sorted(self.predicates.items())),
        }


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n"


def _row_records(pipeline: Pipeline, row: ManifestRow) -> list[dict]:
    final, _trace = pipeline.run(
        row.image_ref, question=row.question, spatial_graph=row.spatial_graph
    )
    records = []
    for instr in generate_instructions(final):
        records.append(
            {
                "record_id": record_id_for(row.image_ref, instr.question, instr.answer),
                "image_ref": row.image_ref,
                "question": instr.question,
                "answer": instr.answer,
                "kind": instr.kind.value,
                "evidence": [
                    {
                        "subject": e.subject,
                        "predicate": e.predicate,
                        "object": e.object,
                        "kind": e.kind.value,
                    }
                    for e in instr.evidence
                ],
                "final_graph": final.to_payload(),
                "source_tag": row.source_tag,
                "review_status": REVIEW_UNREVIEWED,
            }
        )
    return records


def build_dataset(
    manifest: list[ManifestRow],
    pipeline: Pipeline,
    output_path: str | Path,
    parallelism: int = 1,
) -> DatasetStats:
    """Run the pipeline over every manifest row and write the record file.

    One failing row never aborts the corpus: the error lands in a sidecar
    next to the output and the build moves on. Output order follows
    manifest order regardless of parallelism.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    output_path = Path(output_path)
    errors_path = output_path.with_name(output_path.name + ".errors")

    def process(row: ManifestRow):
        try:
            return _row_records(pipeline, row), None
        except InterSceneError as exc:
            return None, {
                "image_ref": row.image_ref,
                "error": type(exc).__name__,
                "detail": str(exc),
            }

    stats = DatasetStats()
    seen_ids: set[str] = set()
    try:
        out = output_path.open("w", encoding="utf-8")
    except OSError as exc:
        raise UnwritableOutput(f"cannot write {output_path}: {exc}") from exc
    with out, errors_path.open("w", encoding="utf-8") as err_out:
        if parallelism == 1:
            results = map(process, manifest)
        else:
            executor = ThreadPoolExecutor(max_workers=parallelism)
            results = executor.map(process, manifest)
        for records, failure in results:
            stats.rows_processed += 1
            if failure is not None:
                stats.rows_failed += 1
                err_out.write(_dump_line(failure))
                continue
            for record in records:
                if record["record_id"] in seen_ids:
                    stats.records_deduped += 1
                    continue
                seen_ids.add(record["record_id"])
                out.write(_dump_line(record))
                stats.records_emitted += 1
                stats.kinds[record["kind"]] = stats.kinds.get(record["kind"], 0) + 1
                for e in record["evidence"]:
                    stats.predicates[e["predicate"]] = (
                        stats.predicates.get(e["predicate"], 0) + 1
                    )
        if parallelism > 1:
            executor.shutdown()
    return stats


def read_records(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetUnreadable(f"cannot read dataset {path}: {exc}") from exc
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetUnreadable(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "record_id" not in obj:
            raise DatasetUnreadable(f"{path}:{lineno}: not an instruction record")
        records.append(obj)
    return records


def load_decisions(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestParse(f"cannot read decision log {path}: {exc}") from exc
    decisions = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestParse(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if obj.get("decision") not in _DECISIONS:
            raise ManifestParse(f"{path}:{lineno}: unknown decision {obj.get('decision')!r}")
        if not obj.get("record_id"):
            raise ManifestParse(f"{path}:{lineno}: missing record_id")
        if obj["decision"] == "edit" and not obj.get("edited_answer"):
            raise ManifestParse(f"{path}:{lineno}: edit decision needs edited_answer")
        decisions.append(obj)
    return decisions


def apply_decision(record: dict, decision: dict) -> dict:
    record = dict(record)
    if decision["decision"] == "accept":
        record["review_status"] = REVIEW_ACCEPTED
    elif decision["decision"] == "reject":
        record["review_status"] = REVIEW_REJECTED
    else:
        record["review_status"] = REVIEW_EDITED
        record["answer"] = decision["edited_answer"]
        # The reviewer's wording is no longer backed by specific edges.
        record["evidence"] = []
    return record


def training_path_for(dataset_path: str | Path) -> Path:
    p = Path(dataset_path)
    return p.with_name(p.stem + ".train" + p.suffix)


@dataclass
class ReviewStats:
    total: int = 0
    unreviewed: int = 0
    accepted: int = 0
    rejected: int = 0
    edited: int = 0
    training_records: int = 0

    def to_payload(self) -> dict:
        return {
            "total": self.total,
            "unreviewed": self.unreviewed,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "edited": self.edited,
            "training_records": self.training_records,
        }


def apply_reviews(
    dataset_path: str | Path,
    decisions: list[dict] | str | Path,
    training_path: str | Path | None = None,
) -> ReviewStats:
    """Fold reviewer decisions into the dataset file and emit training data.

    Later decisions on the same record win. The dataset file is rewritten in
    place with updated statuses; the training file carries every record that
    is not rejected. Applying the same log again is a no-op byte-wise.
    """
    dataset_path = Path(dataset_path)
    if not isinstance(decisions, list):
        decisions = load_decisions(decisions)
    records = read_records(dataset_path)
    by_id = {r["record_id"]: i for i, r in enumerate(records)}
    effective: dict[str, dict] = {}
    for d in decisions:
        if d["record_id"] not in by_id:
            raise UnknownRecordId(d["record_id"])
        effective[d["record_id"]] = d
    for rid, decision in effective.items():
        idx = by_id[rid]
        records[idx] = apply_decision(records[idx], decision)

    if training_path is None:
        training_path = training_path_for(dataset_path)
    training_path = Path(training_path)
    stats = ReviewStats(total=len(records))
    try:
        with dataset_path.open("w", encoding="utf-8") as out:
            for r in records:
                out.write(_dump_line(r))
        with training_path.open("w", encoding="utf-8") as out:
            for r in records:
                if r["review_status"] == REVIEW_REJECTED:
                    continue
                out.write(_dump_line(r))
                stats.training_records += 1
    except OSError as exc:
        raise UnwritableOutput(f"cannot write reviewed dataset: {exc}") from exc
    for r in records:
        status = r["review_status"]
        if status == REVIEW_ACCEPTED:
            stats.accepted += 1
        elif status == REVIEW_REJECTED:
            stats.rejected += 1
        elif status == REVIEW_EDITED:
            stats.edited += 1
        else:
            stats.unreviewed += 1
    return stats


@dataclass
class VariantResult:
    name: str
    rows: list[ManifestRow]
    per_source: dict
    warnings: list[str] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "name": self.name,
            "rows": len(self.rows),
            "per_source": dict(sorted(self.per_source.items())),
            "warnings": list(self.warnings),
        }


def compose_variants(
    sources: dict[str, list[ManifestRow]],
    interaction_rows: list[ManifestRow],
    recipes: list[dict],
) -> list[VariantResult]:
    """Assemble named training mixtures out of base sources plus the
    interaction-augmented rows.

    Each recipe is {"name", "base": [source names], "interaction": bool}.
    """
    out = []
    for recipe in recipes:
        name = recipe.get("name") or "+".join(recipe.get("base", ()))
        rows: list[ManifestRow] = []
        per_source: dict[str, int] = {}
        warnings: list[str] = []
        for source in recipe.get("base", ()):
            if source not in sources:
                raise UnknownSource(f"recipe {name!r} names unknown source {source!r}")
            rows.extend(sources[source])
            per_source[source] = len(sources[source])
        if recipe.get("interaction"):
            if interaction_rows:
                rows.extend(interaction_rows)
                per_source["interaction"] = len(interaction_rows)
            else:
                warnings.append("interaction set is empty; variant equals its base")
                per_source["interaction"] = 0
        out.append(VariantResult(name, rows, per_source, warnings))
    return out


def dataset_stats(records: list[dict]) -> dict:
    """Aggregate view of a record file for the stats command."""
    kinds: dict[str, int] = {}
    statuses = {s: 0 for s in _STATUSES}
    sources: dict[str, int] = {}
    predicates: dict[str, int] = {}
    for r in records:
        kinds[r["kind"]] = kinds.get(r["kind"], 0) + 1
        statuses[r.get("review_status", REVIEW_UNREVIEWED)] += 1
        sources[r["source_tag"]] = sources.get(r["source_tag"], 0) + 1
        for e in r.get("evidence", ()):
            predicates[e["predicate"]] = predicates.get(e["predicate"], 0) + 1
    return {
        "records": len(records),
        "kinds": dict(sorted(kinds.items())),
        "review_status": statuses,
        "sources": dict(sorted(sources.items())),
        "predicates": dict(sorted(predicates.items())),
    }
