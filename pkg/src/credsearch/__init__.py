"""credsearch: integrity-verified full-text search over the public
metadata of an Indy-style verifiable-data-registry ledger."""

from .enrich import AliasDirectory, EnrichedDoc, enrich
from .index import InvertedIndex, Query, ScoredHit, SearchResult, brute_force_search, tokenize
from .ledger_model import (
    ClaimDefData,
    LedgerEntry,
    NymData,
    SchemaData,
    TxnEnvelope,
    TxnType,
    canonical_leaf_bytes,
    classify,
    parse_txn,
)
from .merkle import AuditPath, ConsistencyProof, MerkleTree, verify_audit, verify_consistency
from .simgen import GeneratorConfig, SimLedger, generate
from .sync import SyncService, SyncState, fetch_range

__all__ = [
    "AliasDirectory",
    "AuditPath",
    "ClaimDefData",
    "ConsistencyProof",
    "EnrichedDoc",
    "GeneratorConfig",
    "InvertedIndex",
    "LedgerEntry",
    "MerkleTree",
    "NymData",
    "Query",
    "SchemaData",
    "ScoredHit",
    "SearchResult",
    "SimLedger",
    "SyncService",
    "SyncState",
    "TxnEnvelope",
    "TxnType",
    "brute_force_search",
    "canonical_leaf_bytes",
    "classify",
    "enrich",
    "fetch_range",
    "generate",
    "parse_txn",
    "tokenize",
    "verify_audit",
    "verify_consistency",
]

__version__ = "0.1.0"
