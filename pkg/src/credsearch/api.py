"""REST surface for verifier applications and the web UI.

Implemented as a minimal ASGI application (served by uvicorn) rather
than a full web framework: the /search hot path must sustain thousands
of requests per second under hundreds of connections, and framework
routing/validation overhead dominated at that rate. All endpoints are
read-only views onto index snapshots; search responses are cached per
index version, so repeated queries cost one dict lookup.
"""
from __future__ import annotations

import json
import time
from typing import Optional
from urllib.parse import parse_qsl, unquote

from .index import EmptyQuery, Query, SearchResult
from .ledger_model import TYPE_NAMES, TxnType
from .merkle import IndexOutOfRange
from .sync import PHASE_FATAL, SyncService

MAX_LIMIT = 1000
DEFAULT_LIMIT = 10

_TYPE_BY_NAME = {name: t for t, name in TYPE_NAMES.items()}

_JSON = [(b"content-type", b"application/json")]


def _json_bytes(obj) -> bytes:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


_STATIC_TYPES = {
    ".html": b"text/html; charset=utf-8",
    ".js": b"text/javascript; charset=utf-8",
    ".css": b"text/css; charset=utf-8",
    ".json": b"application/json",
    ".svg": b"image/svg+xml",
}


class QueryApi:
    def __init__(self, service: SyncService, cors: bool = True, ui_dir: Optional[str] = None):
        self.service = service
        self.cors = cors
        self.ui_dir = ui_dir
        self._cache: dict[tuple, bytes] = {}
        self._cache_version = -1

    # -- response builders ---------------------------------------------

    def _hit_body(self, result: SearchResult, took_ms: int) -> dict:
        hits = []
        for h in result.hits:
            doc = self.service.index.get(h.seq_no)
            if doc is None:
                continue
            hit = {
                "seq_no": doc.seq_no,
                "score": h.score,
                "txn_type": TYPE_NAMES[doc.txn_type],
                "attr_names": list(doc.attr_names),
                "author_did": doc.author_did,
                "highlight": [m[1] for m in h.matched_terms],
            }
            if doc.schema_name is not None:
                hit["schema_name"] = doc.schema_name
            if doc.schema_version is not None:
                hit["schema_version"] = doc.schema_version
            if doc.author_alias is not None:
                hit["author_alias"] = doc.author_alias
            hits.append(hit)
        return {"total": result.total, "took_ms": took_ms, "hits": hits}

    def search_response(self, params: dict[str, str]) -> tuple[int, bytes]:
        if self.service.phase == PHASE_FATAL:
            return 503, _json_bytes(
                {"error": "service halted", "reason": self.service.fatal_reason}
            )
        q = params.get("q", "")
        type_name = params.get("type", "any")
        author = params.get("author") or None
        try:
            limit = int(params.get("limit", DEFAULT_LIMIT))
            offset = int(params.get("offset", 0))
        except ValueError:
            return 400, _json_bytes({"error": "limit and offset must be integers"})
        if not q:
            return 400, _json_bytes({"error": "missing query"})
        if not 1 <= limit <= MAX_LIMIT:
            return 400, _json_bytes({"error": f"limit must be in 1..{MAX_LIMIT}"})
        if offset < 0:
            return 400, _json_bytes({"error": "offset must be >= 0"})
        if type_name != "any" and type_name not in _TYPE_BY_NAME:
            return 400, _json_bytes({"error": f"unknown type {type_name!r}"})

        version = self.service.index.version
        if version != self._cache_version:
            self._cache = {}
            self._cache_version = version
        key = (q, type_name, limit, offset, author)
        cached = self._cache.get(key)
        if cached is not None:
            return 200, cached

        type_filter = None
        if type_name != "any":
            type_filter = frozenset({_TYPE_BY_NAME[type_name]})
        started = time.perf_counter()
        try:
            result = self.service.index.search(
                Query(text=q, type_filter=type_filter, limit=limit, offset=offset, author=author)
            )
        except EmptyQuery:
            return 400, _json_bytes({"error": "query yields no searchable terms"})
        took_ms = int((time.perf_counter() - started) * 1000)
        body = _json_bytes(self._hit_body(result, took_ms))
        self._cache[key] = body
        return 200, body

    def txn_response(self, seq_no: int) -> tuple[int, bytes]:
        doc = self.service.index.get(seq_no)
        if doc is None:
            return 404, _json_bytes({"error": f"no transaction {seq_no}"})
        try:
            path = self.service.tree.audit_path(seq_no - 1)
        except IndexOutOfRange:
            return 404, _json_bytes({"error": f"no transaction {seq_no}"})
        body = {
            "seq_no": doc.seq_no,
            "raw": doc.raw,
            "enriched": {
                "txn_type": TYPE_NAMES[doc.txn_type],
                "schema_name": doc.schema_name,
                "schema_version": doc.schema_version,
                "attr_names": list(doc.attr_names),
                "author_did": doc.author_did,
                "author_alias": doc.author_alias,
                "ref_schema_seq": doc.ref_schema_seq,
                "txn_time": doc.txn_time,
            },
            "audit_path": {
                "leaf_index": seq_no - 1,
                "tree_size": path.tree_size,
                "sibling_hashes": [h.hex() for h in path.sibling_hashes],
            },
            "root_hash": self.service.tree.root().hex(),
        }
        return 200, _json_bytes(body)

    def stats_response(self) -> tuple[int, bytes]:
        return 200, _json_bytes(self.service.stats())

    # -- ASGI ----------------------------------------------------------

    def _static_response(self, path: str) -> Optional[tuple[int, bytes, bytes]]:
        if self.ui_dir is None:
            return None
        from pathlib import Path

        root = Path(self.ui_dir).resolve()
        rel = path.lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if root not in target.parents and target != root:
            return None
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return None
        ctype = _STATIC_TYPES.get(target.suffix, b"application/octet-stream")
        return 200, target.read_bytes(), ctype

    async def __call__(self, scope, receive, send) -> None:
        if scope["type"] != "http":
            return
        path = scope["path"]
        status = 404
        body = _json_bytes({"error": "not found"})

        if scope["method"] not in ("GET", "HEAD", "OPTIONS"):
            status, body = 405, _json_bytes({"error": "method not allowed"})
        elif scope["method"] == "OPTIONS":
            status, body = 204, b""
        elif path == "/health":
            status, body = 200, b"ok"
        elif path == "/stats":
            status, body = self.stats_response()
        elif path == "/search":
            params = dict(parse_qsl(scope.get("query_string", b"").decode("utf-8")))
            status, body = self.search_response(params)
        elif path.startswith("/txn/"):
            try:
                seq = int(unquote(path[len("/txn/") :]))
            except ValueError:
                seq = -1
            status, body = self.txn_response(seq)

        content_type = _JSON[0][1]
        if status == 404:
            static = self._static_response(path)
            if static is not None:
                status, body, content_type = static
        if path == "/health":
            content_type = b"text/plain; charset=utf-8"
        headers = [
            (b"content-type", content_type),
            (b"content-length", str(len(body)).encode()),
        ]
        if self.cors:
            headers += [
                (b"access-control-allow-origin", b"*"),
                (b"access-control-allow-methods", b"GET, OPTIONS"),
                (b"access-control-allow-headers", b"*"),
            ]
        await send({"type": "http.response.start", "status": status, "headers": headers})
        await send({"type": "http.response.body", "body": b"" if scope["method"] == "HEAD" else body})


def create_app(service: SyncService, cors: bool = True, ui_dir: Optional[str] = None) -> QueryApi:
    return QueryApi(service, cors=cors, ui_dir=ui_dir)


def run_api_server(
    app: QueryApi, port: int, host: str = "127.0.0.1", log_level: str = "warning"
) -> None:
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level=log_level)
