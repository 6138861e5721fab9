"""Join-enrichment of classified transactions into search documents.

CLAIM_DEFs are joined with the SCHEMA they reference (schema name,
version, attribute names); every document is joined with the author's
human-readable alias from the latest NYM for that DID.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ledger_model import (
    ClaimDefData,
    LedgerEntry,
    NymData,
    SchemaData,
    TxnType,
)


@dataclass(frozen=True)
class EnrichedDoc:
    seq_no: int
    txn_type: TxnType
    author_did: str
    raw: str
    schema_name: Optional[str] = None
    schema_version: Optional[str] = None
    attr_names: tuple[str, ...] = ()
    author_alias: Optional[str] = None
    ref_schema_seq: Optional[int] = None
    txn_time: Optional[int] = None


@dataclass
class AliasDirectory:
    """Latest-wins alias per DID: the NYM with the highest seq_no defines it."""

    _entries: dict[str, tuple[Optional[str], int]] = field(default_factory=dict)

    def record(self, entry: LedgerEntry) -> bool:
        """Record a NYM; returns True when it changed an existing DID's alias."""
        if not isinstance(entry.payload, NymData):
            return False
        nym = entry.payload
        prev = self._entries.get(nym.dest)
        if prev is not None and prev[1] > entry.envelope.seq_no:
            return False
        self._entries[nym.dest] = (nym.alias, entry.envelope.seq_no)
        return prev is not None and prev[0] != nym.alias

    def alias_of(self, did: str) -> Optional[str]:
        entry = self._entries.get(did)
        return entry[0] if entry else None


def enrich(
    entry: LedgerEntry,
    schemas: dict[int, SchemaData],
    aliases: AliasDirectory,
) -> EnrichedDoc:
    """Flatten a classified entry into a search document.

    Missing joins (dangling CLAIM_DEF ref, unknown author DID) leave the
    optional fields absent; enrichment never fails.
    """
    env = entry.envelope
    schema_name = schema_version = None
    attr_names: tuple[str, ...] = ()
    ref_seq = None

    if isinstance(entry.payload, SchemaData):
        schema_name = entry.payload.name
        schema_version = entry.payload.version
        attr_names = entry.payload.attr_names
    elif isinstance(entry.payload, ClaimDefData):
        ref_seq = entry.payload.schema_ref
        ref = schemas.get(ref_seq)
        if ref is not None:
            schema_name = ref.name
            schema_version = ref.version
            attr_names = ref.attr_names

    alias = aliases.alias_of(env.author_did)
    if isinstance(entry.payload, NymData) and entry.payload.alias is not None:
        # a NYM document itself carries the alias it declares
        alias = entry.payload.alias

    return EnrichedDoc(
        seq_no=env.seq_no,
        txn_type=env.txn_type,
        author_did=env.author_did,
        raw=env.raw,
        schema_name=schema_name,
        schema_version=schema_version,
        attr_names=attr_names,
        author_alias=alias,
        ref_schema_seq=ref_seq,
        txn_time=env.txn_time,
    )
