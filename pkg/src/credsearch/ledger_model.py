"""Transaction data model for Indy-style domain ledgers.

Parses raw transaction documents, classifies them into typed entries
(NYM / ATTRIB / SCHEMA / CLAIM_DEF / other) and produces the canonical
byte form that the Merkle layer hashes.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional


class LedgerModelError(Exception):
    """Base class for transaction parsing/classification failures."""


class MalformedDocument(LedgerModelError):
    pass


class MissingField(LedgerModelError):
    pass


class InvalidSeqNo(LedgerModelError):
    pass


class PayloadSchemaViolation(LedgerModelError):
    pass


# Base58 alphabet: no 0, O, I, l. Indy DIDs are 21-22 chars.
_BASE58_RE = re.compile(r"^[1-9A-HJ-NP-Za-km-z]{21,22}$")


def is_valid_did(value: str) -> bool:
    return bool(_BASE58_RE.match(value))


class TxnType(Enum):
    NYM = "1"
    ATTRIB = "100"
    SCHEMA = "101"
    CLAIM_DEF = "102"
    OTHER = "other"

    @classmethod
    def from_code(cls, code: str) -> "TxnType":
        # total: any unrecognized code classifies as OTHER
        for t in (cls.NYM, cls.ATTRIB, cls.SCHEMA, cls.CLAIM_DEF):
            if t.value == code:
                return t
        return cls.OTHER


TYPE_NAMES = {
    TxnType.NYM: "nym",
    TxnType.ATTRIB: "attrib",
    TxnType.SCHEMA: "schema",
    TxnType.CLAIM_DEF: "claim_def",
    TxnType.OTHER: "other",
}


@dataclass(frozen=True)
class TxnEnvelope:
    seq_no: int
    txn_type: TxnType
    author_did: str
    txn_time: Optional[int]
    raw: str

    def document(self) -> dict:
        return json.loads(self.raw)


@dataclass(frozen=True)
class NymData:
    dest: str
    alias: Optional[str] = None
    role: Optional[str] = None


@dataclass(frozen=True)
class SchemaData:
    name: str
    version: str
    attr_names: tuple[str, ...]


@dataclass(frozen=True)
class ClaimDefData:
    schema_ref: int
    signature_type: str
    tag: str


@dataclass(frozen=True)
class OpaquePayload:
    """ATTRIB and unknown transaction payloads, kept as free-form data."""

    data: Any = None


@dataclass(frozen=True)
class LedgerEntry:
    envelope: TxnEnvelope
    payload: Any = field(default=None)


def _dig(doc: dict, *path: str) -> Any:
    cur: Any = doc
    for key in path:
        if not isinstance(cur, dict) or key not in cur:
            return None
        cur = cur[key]
    return cur


def parse_txn(raw: str) -> TxnEnvelope:
    """Parse one raw transaction document into an envelope.

    Raises MalformedDocument, MissingField or InvalidSeqNo.
    """
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedDocument(str(exc)) from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level document must be an object")

    seq_no = _dig(doc, "txnMetadata", "seqNo")
    if seq_no is None:
        raise MissingField("txnMetadata.seqNo")
    if not isinstance(seq_no, int) or isinstance(seq_no, bool) or seq_no < 1:
        raise InvalidSeqNo(f"seqNo must be a positive integer, got {seq_no!r}")

    type_code = _dig(doc, "txn", "type")
    if type_code is None:
        raise MissingField("txn.type")

    author = _dig(doc, "txn", "metadata", "from")
    if author is None:
        raise MissingField("txn.metadata.from")
    if not isinstance(author, str) or not is_valid_did(author):
        raise MalformedDocument(f"txn.metadata.from is not a valid DID: {author!r}")

    txn_time = _dig(doc, "txnMetadata", "txnTime")
    if txn_time is not None and (not isinstance(txn_time, int) or isinstance(txn_time, bool)):
        raise MalformedDocument("txnMetadata.txnTime must be unix seconds")

    return TxnEnvelope(
        seq_no=seq_no,
        txn_type=TxnType.from_code(str(type_code)),
        author_did=author,
        txn_time=txn_time,
        raw=raw,
    )


def classify(env: TxnEnvelope) -> LedgerEntry:
    """Extract the typed payload matching the envelope's transaction type.

    Raises PayloadSchemaViolation when a NYM/SCHEMA/CLAIM_DEF document
    lacks its required fields.
    """
    doc = env.document()
    data = _dig(doc, "txn", "data")

    if env.txn_type is TxnType.NYM:
        dest = _dig(doc, "txn", "data", "dest")
        if not isinstance(dest, str) or not is_valid_did(dest):
            raise PayloadSchemaViolation(f"NYM seq {env.seq_no}: missing or invalid dest")
        alias = _dig(doc, "txn", "data", "alias")
        role = _dig(doc, "txn", "data", "role")
        payload: Any = NymData(
            dest=dest,
            alias=alias if isinstance(alias, str) else None,
            role=role if isinstance(role, str) else None,
        )
    elif env.txn_type is TxnType.SCHEMA:
        name = _dig(doc, "txn", "data", "data", "name")
        version = _dig(doc, "txn", "data", "data", "version")
        attrs = _dig(doc, "txn", "data", "data", "attr_names")
        if not isinstance(name, str) or not name:
            raise PayloadSchemaViolation(f"SCHEMA seq {env.seq_no}: missing name")
        if not isinstance(attrs, list) or not attrs or not all(isinstance(a, str) for a in attrs):
            raise PayloadSchemaViolation(f"SCHEMA seq {env.seq_no}: missing attr_names")
        if len(set(attrs)) != len(attrs):
            raise PayloadSchemaViolation(f"SCHEMA seq {env.seq_no}: duplicate attr_names")
        payload = SchemaData(
            name=name,
            version=version if isinstance(version, str) else "",
            attr_names=tuple(attrs),
        )
    elif env.txn_type is TxnType.CLAIM_DEF:
        ref = _dig(doc, "txn", "data", "ref")
        if not isinstance(ref, int) or isinstance(ref, bool) or ref < 1:
            raise PayloadSchemaViolation(f"CLAIM_DEF seq {env.seq_no}: missing or invalid ref")
        if ref >= env.seq_no:
            raise PayloadSchemaViolation(
                f"CLAIM_DEF seq {env.seq_no}: ref {ref} does not point to an earlier txn"
            )
        sig = _dig(doc, "txn", "data", "signature_type")
        tag = _dig(doc, "txn", "data", "tag")
        payload = ClaimDefData(
            schema_ref=ref,
            signature_type=sig if isinstance(sig, str) else "CL",
            tag=tag if isinstance(tag, str) else "default",
        )
    else:
        payload = OpaquePayload(data=data)

    return LedgerEntry(envelope=env, payload=payload)


def canonical_json(doc: Any) -> str:
    """Canonical text form: sorted keys, no insignificant whitespace, UTF-8."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_leaf_bytes(env: TxnEnvelope) -> bytes:
    """Deterministic byte serialization of the transaction, fed to the Merkle tree."""
    return canonical_json(env.document()).encode("utf-8")
