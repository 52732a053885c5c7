"""Read-only HTTP API over a built knowledge graph.

The graph is an immutable snapshot: every response is a pure function of it,
so repeated calls return identical bytes and concurrent requests need no
locking.  Optionally serves a static directory (the graph explorer UI) at /.
"""

from __future__ import annotations

import json
import mimetypes
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from . import kg as kgmod
from .kg import KnowledgeGraph


class KGServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr: tuple[str, int], kg: KnowledgeGraph, static_dir: Path | None):
        super().__init__(addr, _Handler)
        self.kg = kg
        self.static_dir = static_dir


class _Handler(BaseHTTPRequestHandler):
    server: KGServer

    def log_message(self, fmt: str, *args) -> None:  # keep test output quiet
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _param(self, qs: dict, name: str) -> str | None:
        values = qs.get(name)
        return values[0] if values else None

    def _int_param(self, qs: dict, name: str, default: int) -> int:
        raw = self._param(qs, name)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise _BadRequest(f"parameter {name} must be an integer") from None

    def do_GET(self) -> None:
        parts = urlsplit(self.path)
        qs = parse_qs(parts.query)
        try:
            if parts.path == "/api/health":
                self._send_json(200, {"status": "ok"})
            elif parts.path == "/api/concepts":
                self._concepts(qs)
            elif parts.path == "/api/ego":
                self._ego(qs)
            elif parts.path == "/api/sentence":
                self._sentence(qs)
            elif parts.path.startswith("/api/"):
                self._send_json(404, {"error": "not found"})
            else:
                self._static(parts.path)
        except _BadRequest as exc:
            self._send_json(400, {"error": str(exc)})
        except Exception as exc:  # contract: never 500 over a valid graph
            self._send_json(400, {"error": f"bad request: {exc}"})

    def _concepts(self, qs: dict) -> None:
        prefix = (self._param(qs, "prefix") or "").lower()
        limit = self._int_param(qs, "limit", 20)
        nodes = [n for key, n in self.server.kg.nodes.items() if key.startswith(prefix)]
        nodes.sort(key=lambda n: (-n.freq, n.key))
        self._send_json(
            200,
            {
                "concepts": [
                    {"key": n.key, "display": n.display, "freq": n.freq}
                    for n in nodes[: max(limit, 0)]
                ]
            },
        )

    def _ego(self, qs: dict) -> None:
        concept = self._param(qs, "concept")
        if concept is None:
            raise _BadRequest("missing required parameter: concept")
        raw_preds = self._param(qs, "predicates") or ""
        predicates = {p.strip() for p in raw_preds.split(",") if p.strip()}
        direction = self._param(qs, "direction") or "both"
        limit = self._int_param(qs, "limit", 50)
        try:
            result = kgmod.query_ego(self.server.kg, concept, predicates, direction, limit)
        except ValueError as exc:
            raise _BadRequest(str(exc)) from None
        self._send_json(200, result)

    def _sentence(self, qs: dict) -> None:
        doc_id = self._param(qs, "doc_id")
        if doc_id is None:
            raise _BadRequest("missing required parameter: doc_id")
        raw_idx = self._param(qs, "sent_index")
        if raw_idx is None:
            raise _BadRequest("missing required parameter: sent_index")
        try:
            sent_index = int(raw_idx)
        except ValueError:
            raise _BadRequest("parameter sent_index must be an integer") from None
        text = self.server.kg.sentences.get((doc_id, sent_index))
        if text is None:
            self._send_json(404, {"error": "unknown sentence"})
            return
        self._send_json(200, {"doc_id": doc_id, "sent_index": sent_index, "text": text})

    def _static(self, path: str) -> None:
        root = self.server.static_dir
        if root is None:
            self._send_json(404, {"error": "not found"})
            return
        rel = path.lstrip("/") or "index.html"
        target = (root / rel).resolve()
        try:
            inside = target.is_relative_to(root.resolve())
        except AttributeError:  # pragma: no cover - 3.8 fallback, unused
            inside = str(target).startswith(str(root.resolve()))
        if not inside or not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class _BadRequest(Exception):
    pass


def parse_addr(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"bad address {addr!r}, expected host:port")
    return host or "127.0.0.1", int(port)


def serve(kg: KnowledgeGraph, addr: str, static_dir: str | Path | None = None) -> KGServer:
    """Bind the API server; the caller runs `serve_forever()` on the result."""
    static = Path(static_dir) if static_dir is not None else None
    return KGServer(parse_addr(addr), kg, static)
