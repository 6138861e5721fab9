"""Ledger-copy service: polls the HTTP source in ranges, verifies Merkle
integrity against the source's advertised root, persists transactions and
keeps the full-text index enriched and current.

Two-phase polling: catch-up issues back-to-back max-size range requests
until the head is reached, then the steady phase polls at the configured
interval. A verification failure is fatal and permanently stops the loop;
a tampered copy must never serve search results.
"""
from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import httpx

from .enrich import AliasDirectory, enrich
from .index import InvertedIndex
from .ledger_model import (
    LedgerEntry,
    LedgerModelError,
    SchemaData,
    TxnEnvelope,
    canonical_leaf_bytes,
    classify,
    parse_txn,
)
from .merkle import MerkleTree
from .store import LedgerStore, TamperDetected

log = logging.getLogger(__name__)

RETRY_BASE_SECONDS = 0.25
RETRY_FACTOR = 2
RETRY_MAX_ATTEMPTS = 5

DEFAULT_BATCH_SIZE = 1000
DEFAULT_POLL_INTERVAL = 10.0

PHASE_CATCHING_UP = "catching_up"
PHASE_STEADY = "steady"
PHASE_FATAL = "fatal"


class SyncError(Exception):
    pass


class SourceUnavailable(SyncError):
    pass


class GapDetected(SyncError):
    pass


class SequenceMismatch(SyncError):
    pass


class VerificationFailure(SyncError):
    pass


@dataclass(frozen=True)
class SyncState:
    last_seq: int
    root: bytes
    source_url: str
    poll_interval: float


def fetch_range(
    source_url: str,
    frm: int,
    to: int,
    client: Optional[httpx.Client] = None,
) -> list[TxnEnvelope]:
    """Fetch an inclusive transaction range, retrying transport errors
    with exponential backoff. A range beyond the head returns the partial
    (possibly empty) result rather than failing."""
    if frm > to:
        raise ValueError(f"from {frm} > to {to}")
    own = client is None
    client = client or httpx.Client(timeout=10.0)
    try:
        delay = RETRY_BASE_SECONDS
        for attempt in range(RETRY_MAX_ATTEMPTS):
            try:
                resp = client.get(f"{source_url}/txns", params={"from": frm, "to": to})
            except httpx.TransportError as exc:
                if attempt == RETRY_MAX_ATTEMPTS - 1:
                    raise SourceUnavailable(str(exc)) from exc
                time.sleep(delay)
                delay *= RETRY_FACTOR
                continue
            if resp.status_code == 416:
                return []
            if resp.status_code >= 500:
                if attempt == RETRY_MAX_ATTEMPTS - 1:
                    raise SourceUnavailable(f"HTTP {resp.status_code}")
                time.sleep(delay)
                delay *= RETRY_FACTOR
                continue
            if resp.status_code != 200:
                raise SourceUnavailable(f"HTTP {resp.status_code}: {resp.text[:200]}")
            envs = []
            body = resp.text
            for line in body.splitlines():
                if not line:
                    continue
                try:
                    envs.append(parse_txn(line))
                except LedgerModelError as exc:
                    raise GapDetected(f"unparseable transaction in range response: {exc}") from exc
            for i, env in enumerate(envs):
                if env.seq_no != frm + i:
                    raise GapDetected(f"expected seq {frm + i}, got {env.seq_no}")
            return envs
        raise SourceUnavailable("retries exhausted")
    finally:
        if own:
            client.close()


class SyncService:
    """Single-writer sync state: durable store, Merkle tree, alias
    directory, schema lookup and the search index, kept consistent as one
    unit. Readers take snapshots between batches via the index lock."""

    def __init__(
        self,
        data_dir: str | Path,
        source_url: str,
        poll_interval: float = DEFAULT_POLL_INTERVAL,
        batch_size: int = DEFAULT_BATCH_SIZE,
    ):
        self.source_url = source_url.rstrip("/")
        self.poll_interval = poll_interval
        self.batch_size = batch_size
        self.store = LedgerStore(data_dir)
        self.index = InvertedIndex()
        self.tree = MerkleTree()
        self.schemas: dict[int, SchemaData] = {}
        self.aliases = AliasDirectory()
        self.entries: dict[int, LedgerEntry] = {}
        self.author_docs: dict[str, set[int]] = {}
        self.last_seq = 0
        self.phase = PHASE_CATCHING_UP
        self.fatal_reason: Optional[str] = None
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._load()

    # -- startup -------------------------------------------------------

    def _load(self) -> None:
        try:
            result = self.store.load()
        except TamperDetected as exc:
            self._go_fatal(f"local copy verification failed: {exc}")
            return
        self.tree = result.tree
        for env in result.envelopes:
            self._ingest_entry(classify(env))
        self.last_seq = len(result.envelopes)

    def _go_fatal(self, reason: str) -> None:
        self.phase = PHASE_FATAL
        self.fatal_reason = reason
        log.error("sync halted: %s", reason)

    # -- core operations -----------------------------------------------

    def state(self) -> SyncState:
        with self._lock:
            return SyncState(self.last_seq, self.tree.root(), self.source_url, self.poll_interval)

    def stats(self) -> dict:
        with self._lock:
            return {
                "last_seq": self.last_seq,
                "root_hash": self.tree.root().hex(),
                "doc_count": self.index.doc_count,
                "sync_phase": self.phase,
                "source_url": self.source_url,
            }

    def verify_and_append(self, envs: list[TxnEnvelope]) -> SyncState:
        """Canonicalize, persist and index a contiguous batch."""
        if self.phase == PHASE_FATAL:
            raise VerificationFailure(self.fatal_reason or "sync is halted")
        if not envs:
            return self.state()
        with self._lock:
            if envs[0].seq_no != self.last_seq + 1:
                raise SequenceMismatch(
                    f"batch starts at {envs[0].seq_no}, expected {self.last_seq + 1}"
                )
            for i, env in enumerate(envs):
                if env.seq_no != envs[0].seq_no + i:
                    raise SequenceMismatch(f"batch not contiguous at {env.seq_no}")
            lines = []
            for env in envs:
                leaf = canonical_leaf_bytes(env)
                lines.append(leaf.decode("utf-8"))
                self.tree.append(leaf)
            self.last_seq = envs[-1].seq_no
            self.store.append_batch(lines, self.tree.root().hex(), self.last_seq)
            for env in envs:
                self._ingest_entry(classify(env))
            return SyncState(self.last_seq, self.tree.root(), self.source_url, self.poll_interval)

    def _ingest_entry(self, entry: LedgerEntry) -> None:
        env = entry.envelope
        if isinstance(entry.payload, SchemaData):
            self.schemas[env.seq_no] = entry.payload
        alias_changed = self.aliases.record(entry)
        if alias_changed:
            self._reenrich_author(entry)
        doc = enrich(entry, self.schemas, self.aliases)
        self.index.add_document(doc)
        self.entries[env.seq_no] = entry
        self.author_docs.setdefault(env.author_did, set()).add(env.seq_no)

    def _reenrich_author(self, nym_entry: LedgerEntry) -> None:
        # a NYM changed a known DID's alias: re-enrich documents that DID authored
        did = nym_entry.payload.dest
        for seq in sorted(self.author_docs.get(did, ())):
            self.index.remove_document(seq)
            self.index.add_document(enrich(self.entries[seq], self.schemas, self.aliases))

    # -- polling -------------------------------------------------------

    def sync_once(self, client: Optional[httpx.Client] = None) -> int:
        """One catch-up pass to the source's current head. Returns the
        number of transactions appended; raises on verification failure."""
        if self.phase == PHASE_FATAL:
            raise VerificationFailure(self.fatal_reason or "sync is halted")
        own = client is None
        client = client or httpx.Client(timeout=10.0)
        appended = 0
        try:
            head, advertised_root = self._fetch_root(client)
            if head < self.last_seq:
                self._go_fatal(
                    f"source shrank: head {head} below local copy at {self.last_seq}"
                )
                raise VerificationFailure(self.fatal_reason)
            while self.last_seq < head and not self._stop.is_set():
                frm = self.last_seq + 1
                to = min(head, frm + self.batch_size - 1)
                envs = fetch_range(self.source_url, frm, to, client)
                if not envs:
                    break
                self.verify_and_append(envs)
                appended += len(envs)
            if self.last_seq == head and self.tree.root().hex() != advertised_root:
                self._go_fatal(
                    "source root mismatch at size "
                    f"{head}: local {self.tree.root().hex()} != advertised {advertised_root}"
                )
                raise VerificationFailure(self.fatal_reason)
            return appended
        finally:
            if own:
                client.close()

    def _fetch_root(self, client: httpx.Client) -> tuple[int, str]:
        delay = RETRY_BASE_SECONDS
        for attempt in range(RETRY_MAX_ATTEMPTS):
            try:
                resp = client.get(f"{self.source_url}/root")
                resp.raise_for_status()
                data = resp.json()
                return int(data["size"]), str(data["root_hash"])
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                if attempt == RETRY_MAX_ATTEMPTS - 1:
                    raise SourceUnavailable(str(exc)) from exc
                time.sleep(delay)
                delay *= RETRY_FACTOR
        raise SourceUnavailable("retries exhausted")

    def poll_loop(self) -> None:
        """Blocking two-phase loop; returns only when stopped or fatal."""
        client = httpx.Client(timeout=10.0)
        try:
            while not self._stop.is_set() and self.phase != PHASE_FATAL:
                try:
                    self.sync_once(client)
                    if self.phase != PHASE_FATAL:
                        self.phase = PHASE_STEADY
                except SourceUnavailable as exc:
                    log.warning("ledger source unavailable, will retry: %s", exc)
                except VerificationFailure:
                    return
                self._stop.wait(self.poll_interval)
        finally:
            client.close()

    def start(self) -> None:
        self._thread = threading.Thread(target=self.poll_loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=10)
