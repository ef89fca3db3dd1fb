"""Command-line entry point.

Machine output (JSON or JSON lines) goes to stdout; anything meant for a
person goes to stderr. Exit codes: 0 success, 1 fatal error, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as config_mod
from .dataset import build_dataset, dataset_stats, load_manifest, read_records
from .errors import InterSceneError
from .graph import SceneGraph
from .pipeline import Pipeline
from .queries import generate_instructions
from .rewards import RewardContext, RewardWeights, rank_candidates
from .review import serve


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")


def _note(text: str) -> None:
    sys.stderr.write(text + "\n")


def _load_effective_config(args) -> dict:
    base = config_mod.load_config(getattr(args, "config", None))
    overrides = {}
    for item in getattr(args, "set", None) or ():
        key, value = config_mod.parse_override(item)
        overrides[key] = value
    return config_mod.merge_config(base, overrides)


def _make_pipeline(cfg: dict) -> Pipeline:
    return Pipeline(
        config_mod.make_backend(cfg),
        config_mod.make_pipeline_config(cfg),
        config_mod.make_generation_params(cfg),
    )


def _cmd_build_graph(args) -> int:
    cfg = _load_effective_config(args)
    pipeline = _make_pipeline(cfg)
    final, trace = pipeline.run(args.image, question=args.question)
    if args.trace:
        Path(args.trace).write_text(trace.dumps(), encoding="utf-8")
        _note(f"trace written to {args.trace}")
    _emit(final.to_payload())
    return 0


def _cmd_gen_queries(args) -> int:
    payload = json.loads(Path(args.graph).read_text(encoding="utf-8"))
    graph = SceneGraph.from_payload(payload)
    for instr in generate_instructions(graph):
        _emit(
            {
                "kind": instr.kind.value,
                "question": instr.question,
                "answer": instr.answer,
                "evidence": [
                    {
                        "subject": e.subject,
                        "predicate": e.predicate,
                        "object": e.object,
                        "kind": e.kind.value,
                    }
                    for e in instr.evidence
                ],
            }
        )
    return 0


def _cmd_build_dataset(args) -> int:
    cfg = _load_effective_config(args)
    if args.parallelism is not None:
        cfg = config_mod.merge_config(cfg, {"dataset.parallelism": args.parallelism})
    pipeline = _make_pipeline(cfg)
    manifest = load_manifest(args.manifest)
    stats = build_dataset(
        manifest, pipeline, args.out, parallelism=cfg.get("dataset.parallelism", 1)
    )
    _note(
        f"{stats.records_emitted} records from {stats.rows_processed} rows"
        f" ({stats.rows_failed} failed) -> {args.out}"
    )
    _emit(stats.to_payload())
    return 0


def _parse_weight_flag(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 3:
        raise InterSceneError("--weights expects three comma-separated numbers")
    try:
        focus, disamb, rele = (float(p) for p in parts)
    except ValueError as exc:
        raise InterSceneError(f"bad --weights value: {exc}") from None
    return {
        "reward.focus_weight": focus,
        "reward.disamb_weight": disamb,
        "reward.irrelevance_weight": rele,
    }


def _load_context(path: str) -> RewardContext:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(payload, dict) and "graph" in payload:
        graph = SceneGraph.from_payload(payload["graph"])
        question = payload.get("question", graph.question)
        reference = payload.get("reference_answer")
    else:
        graph = SceneGraph.from_payload(payload)
        question = graph.question
        reference = None
    return RewardContext(graph, question, reference_answer=reference)


def _load_candidates(path: str) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    out = []
    for line in lines:
        if not line.strip():
            continue
        try:
            value = json.loads(line)
        except json.JSONDecodeError:
            value = line
        if isinstance(value, dict):
            value = value.get("text", "")
        if not isinstance(value, str):
            raise InterSceneError(f"candidate line is not text: {line!r}")
        out.append(value)
    return out


def _cmd_score(args) -> int:
    cfg = _load_effective_config(args)
    if args.weights:
        cfg = config_mod.merge_config(cfg, _parse_weight_flag(args.weights))
    weights = config_mod.make_weights(cfg)
    ctx = _load_context(args.context)
    candidates = _load_candidates(args.candidates)
    _emit(
        {
            "weights": {
                "focus": weights.focus_weight,
                "disamb": weights.disamb_weight,
                "rele": weights.irrelevance_weight,
            },
            "candidates": len(candidates),
        }
    )
    for rank, cand in enumerate(rank_candidates(candidates, ctx, weights), start=1):
        row = {"index": cand.index, "rank": rank, "advantage": cand.advantage}
        row.update(cand.breakdown.to_payload())
        _emit(row)
    return 0


def _cmd_serve_review(args) -> int:
    server = serve(
        args.dataset,
        args.log,
        images_dir=args.images,
        bind=args.bind,
        quiet=False,
    )
    host, port = server.server_address[:2]
    _note(f"review service on http://{host}:{port} (Ctrl+C stops)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        _note("shutting down")
    finally:
        server.server_close()
    return 0


def _cmd_stats(args) -> int:
    records = read_records(args.dataset)
    _emit(dataset_stats(records))
    return 0


def _add_config_flags(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument("--config", required=required, help="flat JSON config file")
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one config key (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interscene",
        description="Interaction-aware scene graphs: build, query, score, review.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="run the staged pipeline over one image")
    p.add_argument("--image", required=True, help="image reference known to the backend")
    p.add_argument("--question", help="question guiding relevance and focus")
    p.add_argument("--trace", help="write the pipeline trace JSON here")
    _add_config_flags(p, required=True)
    p.set_defaults(func=_cmd_build_graph)

    p = sub.add_parser("gen-queries", help="generate QA instructions from a graph file")
    p.add_argument("--graph", required=True, help="serialized graph JSON file")
    p.set_defaults(func=_cmd_gen_queries)

    p = sub.add_parser("build-dataset", help="run the pipeline over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--parallelism", type=int)
    _add_config_flags(p, required=True)
    p.set_defaults(func=_cmd_build_dataset)

    p = sub.add_parser("score", help="score and rank candidate answers")
    p.add_argument("--context", required=True, help="graph (or {graph, question}) JSON")
    p.add_argument("--candidates", required=True, help="JSONL, one candidate per line")
    p.add_argument("--weights", help="focus,disamb,rele")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("serve-review", help="run the review HTTP service")
    p.add_argument("--dataset", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--images", help="directory served under /images/")
    p.add_argument("--bind", default="127.0.0.1:8765")
    p.set_defaults(func=_cmd_serve_review)

    p = sub.add_parser("stats", help="summarize a dataset file")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InterSceneError as exc:
        _note(f"error: {exc}")
        return 1
    except OSError as exc:
        _note(f"error: {exc}")
        return 1
    except json.JSONDecodeError as exc:
        _note(f"error: invalid JSON input: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
