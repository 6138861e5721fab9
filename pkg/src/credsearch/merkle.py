"""Append-only Merkle tree over canonical transaction bytes.

RFC-6962-style construction: leaf hash = SHA-256(0x00 || leaf), interior
node = SHA-256(0x01 || left || right), where the left subtree of n leaves
covers the largest power of two strictly less than n. Audit paths and
consistency proofs follow the same RFC's algorithms.

State is just the ordered list of leaf hashes; interior hashes are
memoized per (lo, hi) range, which stays valid because appended leaves
never change existing ranges.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass


class IndexOutOfRange(Exception):
    pass


def _leaf_hash(leaf: bytes) -> bytes:
    return hashlib.sha256(b"\x00" + leaf).digest()


def _node_hash(left: bytes, right: bytes) -> bytes:
    return hashlib.sha256(b"\x01" + left + right).digest()


def _largest_power_of_two_below(n: int) -> int:
    # largest power of two strictly less than n (n >= 2)
    k = 1
    while k * 2 < n:
        k *= 2
    return k


EMPTY_ROOT = hashlib.sha256(b"").digest()


@dataclass(frozen=True)
class AuditPath:
    leaf_index: int
    tree_size: int
    sibling_hashes: tuple[bytes, ...]


@dataclass(frozen=True)
class ConsistencyProof:
    old_size: int
    new_size: int
    hashes: tuple[bytes, ...]


class MerkleTree:
    def __init__(self, leaves: list[bytes] | None = None):
        self._leaf_hashes: list[bytes] = []
        self._memo: dict[tuple[int, int], bytes] = {}
        for leaf in leaves or []:
            self.append(leaf)

    @property
    def leaf_count(self) -> int:
        return len(self._leaf_hashes)

    def append(self, leaf: bytes) -> bytes:
        self._leaf_hashes.append(_leaf_hash(leaf))
        return self.root()

    def append_leaf_hash(self, leaf_hash: bytes) -> bytes:
        self._leaf_hashes.append(leaf_hash)
        return self.root()

    def root(self) -> bytes:
        return self._subtree_hash(0, self.leaf_count)

    def root_at(self, size: int) -> bytes:
        """Root of the tree as it was when it held the first `size` leaves."""
        if size < 0 or size > self.leaf_count:
            raise IndexOutOfRange(f"size {size} not in [0, {self.leaf_count}]")
        return self._subtree_hash(0, size)

    def _subtree_hash(self, lo: int, hi: int) -> bytes:
        n = hi - lo
        if n == 0:
            return EMPTY_ROOT
        if n == 1:
            return self._leaf_hashes[lo]
        key = (lo, hi)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        k = _largest_power_of_two_below(n)
        h = _node_hash(self._subtree_hash(lo, lo + k), self._subtree_hash(lo + k, hi))
        self._memo[key] = h
        return h

    def audit_path(self, index: int, tree_size: int | None = None) -> AuditPath:
        size = self.leaf_count if tree_size is None else tree_size
        if size > self.leaf_count:
            raise IndexOutOfRange(f"tree_size {size} exceeds leaf count {self.leaf_count}")
        if index < 0 or index >= size:
            raise IndexOutOfRange(f"index {index} not in [0, {size})")
        return AuditPath(index, size, tuple(self._path(index, 0, size)))

    def _path(self, m: int, lo: int, hi: int) -> list[bytes]:
        n = hi - lo
        if n <= 1:
            return []
        k = _largest_power_of_two_below(n)
        if m - lo < k:
            return self._path(m, lo, lo + k) + [self._subtree_hash(lo + k, hi)]
        return self._path(m, lo + k, hi) + [self._subtree_hash(lo, lo + k)]

    def consistency_proof(self, old_size: int, new_size: int | None = None) -> ConsistencyProof:
        new = self.leaf_count if new_size is None else new_size
        if not (0 < old_size <= new <= self.leaf_count):
            raise IndexOutOfRange(f"need 0 < {old_size} <= {new} <= {self.leaf_count}")
        hashes = [] if old_size == new else self._consistency(old_size, 0, new, True)
        return ConsistencyProof(old_size, new, tuple(hashes))

    def _consistency(self, m: int, lo: int, hi: int, complete: bool) -> list[bytes]:
        n = hi - lo
        if m == n:
            return [] if complete else [self._subtree_hash(lo, hi)]
        k = _largest_power_of_two_below(n)
        if m <= k:
            return self._consistency(m, lo, lo + k, complete) + [self._subtree_hash(lo + k, hi)]
        return self._consistency(m - k, lo + k, hi, False) + [self._subtree_hash(lo, lo + k)]


def verify_audit(leaf: bytes, index: int, tree_size: int, path: AuditPath, root: bytes) -> bool:
    """True iff recomputing from the leaf along the path reproduces the root."""
    if index < 0 or index >= tree_size:
        return False
    h = _leaf_hash(leaf)
    fn, sn = index, tree_size - 1
    for sibling in path.sibling_hashes:
        if sn == 0:
            return False
        if fn % 2 == 1 or fn == sn:
            h = _node_hash(sibling, h)
            while fn % 2 == 0 and fn != 0:
                fn //= 2
                sn //= 2
        else:
            h = _node_hash(h, sibling)
        fn //= 2
        sn //= 2
    return sn == 0 and h == root


def verify_consistency(old_root: bytes, new_root: bytes, proof: ConsistencyProof) -> bool:
    """True iff the proof shows the old tree is a prefix of the new tree."""
    old_size, new_size = proof.old_size, proof.new_size
    if old_size == new_size:
        return len(proof.hashes) == 0 and old_root == new_root
    if not (0 < old_size < new_size):
        return False
    hashes = list(proof.hashes)
    if not hashes:
        return False

    # RFC 6962 section 2.1.4.2 verification
    fn, sn = old_size - 1, new_size - 1
    while fn % 2 == 1:
        fn //= 2
        sn //= 2
    if fn == 0:
        fr = nr = old_root
    else:
        fr = nr = hashes.pop(0)
    for h in hashes:
        if sn == 0:
            return False
        if fn % 2 == 1 or fn == sn:
            fr = _node_hash(h, fr)
            nr = _node_hash(h, nr)
            while fn % 2 == 0 and fn != 0:
                fn //= 2
                sn //= 2
        else:
            nr = _node_hash(nr, h)
        fn //= 2
        sn //= 2
    return sn == 0 and fr == old_root and nr == new_root
