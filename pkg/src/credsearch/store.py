"""Durable verified ledger copy.

One append-only newline-delimited file of canonical transaction
documents per ledger, plus a small checkpoint record (last_seq, root
hex) rewritten atomically after each batch. On load the whole file is
re-parsed and re-hashed; any divergence from the checkpoint is a tamper
signal. A final line without its newline is the one condition treated as
a torn write (crash mid-append) and truncated instead.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .ledger_model import (
    LedgerModelError,
    TxnEnvelope,
    canonical_json,
    parse_txn,
)
from .merkle import MerkleTree

LEDGER_FILE = "ledger.ndjson"
CHECKPOINT_FILE = "checkpoint.json"


class TamperDetected(Exception):
    """The stored ledger copy does not match its verified checkpoint."""


@dataclass
class LoadResult:
    envelopes: list[TxnEnvelope]
    tree: MerkleTree


class LedgerStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.ledger_path = self.data_dir / LEDGER_FILE
        self.checkpoint_path = self.data_dir / CHECKPOINT_FILE

    def read_checkpoint(self) -> Optional[tuple[int, str]]:
        if not self.checkpoint_path.exists():
            return None
        data = json.loads(self.checkpoint_path.read_text("utf-8"))
        return int(data["last_seq"]), str(data["root_hash"])

    def write_checkpoint(self, last_seq: int, root_hex: str) -> None:
        tmp = self.checkpoint_path.with_suffix(".tmp")
        tmp.write_text(canonical_json({"last_seq": last_seq, "root_hash": root_hex}), "utf-8")
        os.replace(tmp, self.checkpoint_path)

    def load(self) -> LoadResult:
        """Re-parse, re-hash and verify the stored copy.

        Raises TamperDetected on any mismatch against the checkpoint or
        on internal inconsistency (bad line, seq gap) inside the
        checkpointed prefix.
        """
        checkpoint = self.read_checkpoint()
        ckpt_seq = checkpoint[0] if checkpoint else 0

        lines: list[str] = []
        torn = False
        if self.ledger_path.exists():
            data = self.ledger_path.read_bytes()
            if data:
                torn = not data.endswith(b"\n")
                lines = data.decode("utf-8", errors="replace").splitlines()

        envelopes: list[TxnEnvelope] = []
        tree = MerkleTree()
        for i, line in enumerate(lines):
            seq = i + 1
            is_torn_tail = torn and i == len(lines) - 1 and seq > ckpt_seq
            try:
                env = parse_txn(line)
                if env.seq_no != seq:
                    raise LedgerModelError(f"expected seq {seq}, found {env.seq_no}")
                if canonical_json(env.document()) != line:
                    raise LedgerModelError(f"seq {seq} is not in canonical form")
            except LedgerModelError as exc:
                if is_torn_tail:
                    self._truncate_to(envelopes)
                    break
                raise TamperDetected(f"line {seq}: {exc}") from exc
            envelopes.append(env)
            tree.append(line.encode("utf-8"))

        if checkpoint is not None:
            last_seq, root_hex = checkpoint
            if last_seq > len(envelopes):
                raise TamperDetected(
                    f"checkpoint covers {last_seq} transactions but only {len(envelopes)} stored"
                )
            if tree.root_at(last_seq).hex() != root_hex:
                raise TamperDetected("stored transactions do not reproduce the checkpoint root")

        # bring the checkpoint forward over any verified post-checkpoint tail
        if len(envelopes) > ckpt_seq:
            self.write_checkpoint(len(envelopes), tree.root().hex())
        return LoadResult(envelopes=envelopes, tree=tree)

    def _truncate_to(self, envelopes: list[TxnEnvelope]) -> None:
        keep = "".join(env.raw + "\n" for env in envelopes)
        self.ledger_path.write_text(keep, "utf-8")

    def append_batch(self, canonical_lines: list[str], root_hex: str, last_seq: int) -> None:
        """Durably append a verified batch, then move the checkpoint."""
        if not canonical_lines:
            return
        with open(self.ledger_path, "a", encoding="utf-8") as f:
            f.write("".join(line + "\n" for line in canonical_lines))
            f.flush()
            os.fsync(f.fileno())
        self.write_checkpoint(last_seq, root_hex)
