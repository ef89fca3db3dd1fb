"""HTTP review service over a built dataset.

Serves the verification queue, records reviewer decisions into an
append-only JSONL log, and reconstructs its state from that log on
restart. Pure stdlib: a threading HTTP server in front of a locked
in-memory store.
"""

from __future__ import annotations

import json
import mimetypes
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from .dataset import (
    REVIEW_UNREVIEWED,
    apply_decision,
    load_decisions,
    read_records,
)
from .errors import BindFailure, UnknownRecordId, UnwritableOutput

_DECISIONS = ("accept", "reject", "edit")


class ReviewStore:
    """Dataset records plus the effect of every logged decision.

    The log is the source of truth: startup replays it over the dataset,
    so a restarted service shows exactly the state the previous one had.
    """

    def __init__(self, dataset_path: str | Path, log_path: str | Path) -> None:
        self.log_path = Path(log_path)
        records = read_records(dataset_path)
        self._order = [r["record_id"] for r in records]
        self._records = {r["record_id"]: r for r in records}
        self._lock = threading.Lock()
        if self.log_path.exists():
            for decision in load_decisions(self.log_path):
                self._apply(decision)

    def _apply(self, decision: dict) -> dict:
        rid = decision["record_id"]
        if rid not in self._records:
            raise UnknownRecordId(rid)
        self._records[rid] = apply_decision(self._records[rid], decision)
        return self._records[rid]

    def queue(self, n: int) -> list[dict]:
        """Oldest n unreviewed records, in dataset order."""
        with self._lock:
            out = []
            for rid in self._order:
                if len(out) >= n:
                    break
                if self._records[rid]["review_status"] == REVIEW_UNREVIEWED:
                    out.append(dict(self._records[rid]))
            return out

    def item(self, record_id: str) -> dict:
        with self._lock:
            if record_id not in self._records:
                raise UnknownRecordId(record_id)
            return dict(self._records[record_id])

    def decide(
        self,
        record_id: str,
        decision: str,
        edited_answer: str | None = None,
        reviewer: str = "anonymous",
    ) -> dict:
        """Validate, append to the log, then apply. Last write wins."""
        if decision not in _DECISIONS:
            raise ValueError(f"unknown decision {decision!r}")
        if decision == "edit" and not (edited_answer and edited_answer.strip()):
            raise ValueError("edit decision needs a non-empty edited_answer")
        entry = {
            "record_id": record_id,
            "decision": decision,
            "reviewer": reviewer or "anonymous",
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        if decision == "edit":
            entry["edited_answer"] = edited_answer
        with self._lock:
            if record_id not in self._records:
                raise UnknownRecordId(record_id)
            try:
                with self.log_path.open("a", encoding="utf-8") as log:
                    log.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")
            except OSError as exc:
                raise UnwritableOutput(f"cannot append to {self.log_path}: {exc}") from exc
            return dict(self._apply(entry))

    def stats(self) -> dict:
        with self._lock:
            counts = {"total": len(self._records), "unreviewed": 0, "accepted": 0, "rejected": 0, "edited": 0}
            for r in self._records.values():
                counts[r["review_status"]] += 1
            return counts


@dataclass
class ServiceConfig:
    images_dir: Path | None = None


def _handler_for(store: ReviewStore, config: ServiceConfig, quiet: bool):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            if not quiet:
                super().log_message(fmt, *args)

        def _send_json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self._cors()
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _cors(self) -> None:
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")

        def do_OPTIONS(self):  # noqa: N802 (http.server API)
            self.send_response(204)
            self._cors()
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):  # noqa: N802
            url = urlparse(self.path)
            parts = [p for p in url.path.split("/") if p]
            if parts == ["api", "queue"]:
                params = parse_qs(url.query)
                try:
                    n = int(params.get("n", ["10"])[0])
                except ValueError:
                    self._send_json(400, {"error": "BadRequest"})
                    return
                self._send_json(200, {"items": store.queue(max(n, 0))})
            elif len(parts) == 3 and parts[:2] == ["api", "item"]:
                try:
                    self._send_json(200, store.item(unquote(parts[2])))
                except UnknownRecordId:
                    self._send_json(404, {"error": "UnknownRecordId"})
            elif parts == ["api", "stats"]:
                self._send_json(200, store.stats())
            elif parts and parts[0] == "images":
                self._serve_image(parts[1:])
            else:
                self._send_json(404, {"error": "NotFound"})

        def _serve_image(self, ref_parts: list[str]) -> None:
            if config.images_dir is None or not ref_parts:
                self._send_json(404, {"error": "NotFound"})
                return
            ref = unquote("/".join(ref_parts))
            root = config.images_dir.resolve()
            candidate = (root / ref).resolve()
            if not candidate.is_relative_to(root) or not candidate.is_file():
                self._send_json(404, {"error": "NotFound"})
                return
            data = candidate.read_bytes()
            ctype = mimetypes.guess_type(candidate.name)[0] or "application/octet-stream"
            self.send_response(200)
            self._cors()
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_POST(self):  # noqa: N802
            url = urlparse(self.path)
            parts = [p for p in url.path.split("/") if p]
            if len(parts) != 4 or parts[:2] != ["api", "item"] or parts[3] != "decision":
                self._send_json(404, {"error": "NotFound"})
                return
            length = int(self.headers.get("Content-Length") or 0)
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
                if not isinstance(body, dict):
                    raise ValueError("body must be a JSON object")
                record = store.decide(
                    unquote(parts[2]),
                    body.get("decision", ""),
                    edited_answer=body.get("edited_answer"),
                    reviewer=body.get("reviewer", "anonymous"),
                )
            except UnknownRecordId:
                self._send_json(404, {"error": "UnknownRecordId"})
            except (json.JSONDecodeError, ValueError):
                self._send_json(400, {"error": "BadRequest"})
            else:
                self._send_json(200, record)

    return Handler


def serve(
    dataset_path: str | Path,
    log_path: str | Path,
    images_dir: str | Path | None = None,
    bind: str = "127.0.0.1:8765",
    quiet: bool = True,
) -> ThreadingHTTPServer:
    """Start the review service; the caller runs serve_forever()/shutdown().

    The returned server carries the store as ``server.store`` so embedding
    code (and tests) can inspect state directly.
    """
    store = ReviewStore(dataset_path, log_path)
    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise BindFailure(f"bind address must be host:port, got {bind!r}")
    config = ServiceConfig(Path(images_dir) if images_dir else None)
    try:
        server = ThreadingHTTPServer((host, int(port_text)), _handler_for(store, config, quiet))
    except OSError as exc:
        raise BindFailure(f"cannot bind {bind}: {exc}") from exc
    server.store = store
    return server
