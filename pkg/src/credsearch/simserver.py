"""HTTP source serving a simulated verifiable data registry.

Read endpoints mirror what a ledger-copy service needs: range reads
(newline-delimited raw documents), size and advertised root. POST /txns
is a testing hook for live-sync scenarios and only exists when the
server is started as mutable.
"""
from __future__ import annotations

import threading

from fastapi import FastAPI, Request, Response

from .ledger_model import (
    LedgerModelError,
    canonical_json,
    canonical_leaf_bytes,
    classify,
    parse_txn,
)
from .merkle import MerkleTree
from .simgen import SimLedger

DEFAULT_MAX_BATCH = 1000


class SimSource:
    """In-process ledger state behind the simulator endpoints."""

    def __init__(self, ledger: SimLedger, mutable: bool = False, max_batch: int = DEFAULT_MAX_BATCH):
        self._lock = threading.Lock()
        self._raws = [env.raw for env in ledger.envelopes]
        self._tree = MerkleTree([canonical_leaf_bytes(env) for env in ledger.envelopes])
        self.mutable = mutable
        self.max_batch = max_batch

    @property
    def size(self) -> int:
        with self._lock:
            return len(self._raws)

    def root_hex(self) -> str:
        with self._lock:
            return self._tree.root().hex()

    def range(self, frm: int, to: int) -> list[str]:
        with self._lock:
            hi = min(to, len(self._raws), frm + self.max_batch - 1)
            return self._raws[frm - 1 : hi]

    def append(self, raw: str) -> int:
        """Validate and append one transaction; returns the new size."""
        env = parse_txn(raw)
        with self._lock:
            expected = len(self._raws) + 1
            if env.seq_no != expected:
                raise ValueError(f"seqNo must be {expected}, got {env.seq_no}")
            classify(env)  # payload must be well-formed for its type
            from .ledger_model import _dig  # reference validity for claim defs

            doc = env.document()
            ref = _dig(doc, "txn", "data", "ref")
            if env.txn_type.value == "102" and not (isinstance(ref, int) and 1 <= ref < env.seq_no):
                raise ValueError("CLAIM_DEF ref must target an earlier transaction")
            canonical = canonical_json(doc)
            self._raws.append(canonical)
            self._tree.append(canonical.encode("utf-8"))
            return len(self._raws)


def create_sim_app(source: SimSource, genesis_count: int = 1) -> FastAPI:
    app = FastAPI(title="credsearch ledger simulator")

    @app.get("/genesis")
    def genesis() -> Response:
        txns = source.range(1, genesis_count)
        return Response("\n".join(txns), media_type="text/plain; charset=utf-8")

    @app.get("/size")
    def size() -> dict:
        return {"size": source.size}

    @app.get("/root")
    def root() -> dict:
        return {"size": source.size, "root_hash": source.root_hex()}

    @app.get("/txns")
    def txns(request: Request) -> Response:
        params = request.query_params
        try:
            frm = int(params["from"])
            to = int(params["to"])
        except (KeyError, ValueError):
            return Response("from and to must be integers", status_code=400)
        if frm < 1 or to < frm:
            return Response("invalid range", status_code=400)
        if frm > source.size:
            return Response("range starts beyond head", status_code=416)
        body = "\n".join(source.range(frm, to))
        return Response(body, media_type="text/plain; charset=utf-8")

    @app.post("/txns")
    async def post_txn(request: Request) -> Response:
        if not source.mutable:
            return Response("simulator is read-only", status_code=403)
        raw = (await request.body()).decode("utf-8")
        try:
            new_size = source.append(raw)
        except (LedgerModelError, ValueError) as exc:
            return Response(str(exc), status_code=422)
        return Response(canonical_json({"size": new_size}), media_type="application/json")

    return app


def run_sim_server(source: SimSource, port: int, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_sim_app(source), host=host, port=port, log_level="warning")
