import json
import socket
import threading
import time

import pytest
import uvicorn

from credsearch.enrich import AliasDirectory, enrich
from credsearch.ledger_model import canonical_json, classify, parse_txn


def make_nym(seq, dest, alias=None, author=None, role="101"):
    data = {"dest": dest, "role": role}
    if alias is not None:
        data["alias"] = alias
    doc = {
        "txn": {"type": "1", "metadata": {"from": author or dest}, "data": data},
        "txnMetadata": {"seqNo": seq, "txnTime": 1530000000 + seq},
    }
    return canonical_json(doc)


def make_schema(seq, author, name, version="1.0", attrs=("name", "date_of_birth")):
    doc = {
        "txn": {
            "type": "101",
            "metadata": {"from": author},
            "data": {"data": {"name": name, "version": version, "attr_names": list(attrs)}},
        },
        "txnMetadata": {"seqNo": seq, "txnTime": 1530000000 + seq},
    }
    return canonical_json(doc)


def make_claim_def(seq, author, ref, tag="default"):
    doc = {
        "txn": {
            "type": "102",
            "metadata": {"from": author},
            "data": {"ref": ref, "signature_type": "CL", "tag": tag,
                     "data": {"primary": {"n": "ab" * 16}}},
        },
        "txnMetadata": {"seqNo": seq, "txnTime": 1530000000 + seq},
    }
    return canonical_json(doc)


DID_A = "FzAaV9Waa1DccDa72qwg13"
DID_B = "V4SGRU86Z58d6TV7PBUe6f"
DID_C = "2pJGF9p7kpzb6eU326EFZw"


def replay_docs(envelopes):
    """Enrich a whole ledger in two passes: collect schemas and the
    latest-wins alias directory first, then enrich every entry against the
    final directories. Equivalent to incremental ingestion with alias
    re-enrichment, but computed independently of SyncService."""
    entries = [classify(env) for env in envelopes]
    schemas = {}
    aliases = AliasDirectory()
    for entry in entries:
        from credsearch.ledger_model import SchemaData

        if isinstance(entry.payload, SchemaData):
            schemas[entry.envelope.seq_no] = entry.payload
        aliases.record(entry)
    return [enrich(entry, schemas, aliases) for entry in entries]


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class ServerThread:
    """Run any ASGI app under uvicorn in a background thread."""

    def __init__(self, app, port=None):
        self.port = port or free_port()
        self.config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        self.server = uvicorn.Server(self.config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    @property
    def url(self):
        return f"http://127.0.0.1:{self.port}"

    def __enter__(self):
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        return self

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)


@pytest.fixture
def fixture_raws():
    """Small mixed-type ledger: genesis NYM (Phil Windley), an org NYM,
    a schema, two claim defs referencing it, and an unmatched schema."""
    return [
        make_nym(1, DID_A, alias="Phil Windley", role="0"),
        make_nym(2, DID_B, alias="Desert Schools Credit Union", author=DID_A),
        make_schema(3, DID_B, "ID card", attrs=("name", "date_of_birth")),
        make_claim_def(4, DID_B, 3, tag="t1"),
        make_claim_def(5, DID_B, 3, tag="t2"),
        make_schema(6, DID_B, "proof of employment", attrs=("name", "company", "title")),
    ]


@pytest.fixture
def fixture_envelopes(fixture_raws):
    return [parse_txn(raw) for raw in fixture_raws]


@pytest.fixture
def fixture_docs(fixture_envelopes):
    return replay_docs(fixture_envelopes)


def load_schema(name):
    from pathlib import Path

    return json.loads((Path(__file__).parent.parent / "schemas" / name).read_text())
