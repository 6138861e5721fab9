import hashlib
import random

import pytest

from credsearch.merkle import (
    EMPTY_ROOT,
    IndexOutOfRange,
    MerkleTree,
    verify_audit,
    verify_consistency,
)


# Independent oracle: direct recursive Merkle-tree-hash over a leaf list,
# written without reference to the incremental implementation.
def oracle_mth(leaves):
    n = len(leaves)
    if n == 0:
        return hashlib.sha256(b"").digest()
    if n == 1:
        return hashlib.sha256(b"\x00" + leaves[0]).digest()
    k = 1
    while k * 2 < n:
        k *= 2
    return hashlib.sha256(b"\x01" + oracle_mth(leaves[:k]) + oracle_mth(leaves[k:])).digest()


def random_leaves(n, seed=0):
    rng = random.Random(seed)
    return [rng.randbytes(rng.randint(0, 40)) for _ in range(n)]


class TestRoots:
    def test_empty_root(self):
        assert MerkleTree().root() == EMPTY_ROOT == hashlib.sha256(b"").digest()

    def test_single_leaf_definition(self):
        leaf = b"hello ledger"
        assert MerkleTree([leaf]).root() == hashlib.sha256(b"\x00" + leaf).digest()

    def test_two_leaf_definition(self):
        l1, l2 = b"first", b"second"
        h1 = hashlib.sha256(b"\x00" + l1).digest()
        h2 = hashlib.sha256(b"\x00" + l2).digest()
        assert MerkleTree([l1, l2]).root() == hashlib.sha256(b"\x01" + h1 + h2).digest()

    def test_incremental_equals_batch_rebuild_1000_leaves(self):
        leaves = random_leaves(1000, seed=1)
        incremental = MerkleTree()
        for leaf in leaves:
            incremental.append(leaf)
        assert incremental.root() == MerkleTree(leaves).root() == oracle_mth(leaves)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8, 9, 15, 16, 17, 31, 33, 64, 127, 255, 256, 257, 1024])
    def test_matches_oracle_across_sizes(self, n):
        leaves = random_leaves(n, seed=n)
        assert MerkleTree(leaves).root() == oracle_mth(leaves)

    def test_append_never_changes_existing_leaf_hashes(self):
        leaves = random_leaves(50, seed=2)
        tree = MerkleTree(leaves)
        roots_before = [tree.root_at(i) for i in range(51)]
        tree.append(b"new leaf")
        assert [tree.root_at(i) for i in range(51)] == roots_before

    def test_tamper_evidence_exhaustive_small(self):
        for n in (1, 2, 3, 7, 8, 16, 33, 256):
            leaves = random_leaves(n, seed=100 + n)
            base = MerkleTree(leaves).root()
            for i in range(n):
                mutated = list(leaves)
                mutated[i] = mutated[i] + b"x"
                assert MerkleTree(mutated).root() != base


class TestAuditPaths:
    def test_single_leaf_empty_path(self):
        tree = MerkleTree([b"only"])
        assert tree.audit_path(0).sibling_hashes == ()

    def test_all_indices_of_8_leaf_tree_verify(self):
        leaves = random_leaves(8, seed=3)
        tree = MerkleTree(leaves)
        root = tree.root()
        for i, leaf in enumerate(leaves):
            path = tree.audit_path(i)
            assert verify_audit(leaf, i, 8, path, root)

    def test_index_out_of_range(self):
        tree = MerkleTree([b"a", b"b"])
        with pytest.raises(IndexOutOfRange):
            tree.audit_path(2)

    def test_audit_completeness_up_to_256(self):
        for n in (1, 2, 3, 5, 9, 17, 64, 129, 256):
            leaves = random_leaves(n, seed=200 + n)
            tree = MerkleTree(leaves)
            root = tree.root()
            for i, leaf in enumerate(leaves):
                assert verify_audit(leaf, i, n, tree.audit_path(i), root)

    def test_flipped_leaf_bit_fails(self):
        leaves = random_leaves(8, seed=4)
        leaves[3] = b"payload-under-test"
        tree = MerkleTree(leaves)
        path = tree.audit_path(3)
        root = tree.root()
        for byte_pos in range(len(leaves[3])):
            for bit in range(8):
                mutated = bytearray(leaves[3])
                mutated[byte_pos] ^= 1 << bit
                assert not verify_audit(bytes(mutated), 3, 8, path, root)

    def test_wrong_index_fails(self):
        leaves = random_leaves(8, seed=5)
        tree = MerkleTree(leaves)
        path = tree.audit_path(3)
        assert not verify_audit(leaves[3], 4, 8, path, tree.root())
        assert not verify_audit(leaves[3], 2, 8, path, tree.root())


class TestConsistency:
    def test_equal_sizes(self):
        leaves = random_leaves(5, seed=6)
        tree = MerkleTree(leaves)
        proof = tree.consistency_proof(5, 5)
        assert verify_consistency(tree.root(), tree.root(), proof)
        other = MerkleTree(random_leaves(5, seed=7))
        assert not verify_consistency(other.root(), tree.root(), proof)

    def test_grow_4_to_7(self):
        leaves = random_leaves(7, seed=8)
        tree = MerkleTree(leaves)
        old_root = MerkleTree(leaves[:4]).root()
        proof = tree.consistency_proof(4, 7)
        assert verify_consistency(old_root, tree.root(), proof)

    def test_all_prefix_pairs_up_to_64(self):
        leaves = random_leaves(64, seed=9)
        tree = MerkleTree(leaves)
        for old in range(1, 65, 7):
            for new in range(old, 65, 5):
                proof = tree.consistency_proof(old, new)
                assert verify_consistency(tree.root_at(old), tree.root_at(new), proof), (old, new)

    def test_mutated_prefix_fails(self):
        leaves = random_leaves(7, seed=10)
        old_root = MerkleTree(leaves[:4]).root()
        mutated = list(leaves)
        mutated[2] = b"tampered"
        new_tree = MerkleTree(mutated)
        proof = new_tree.consistency_proof(4, 7)
        assert not verify_consistency(old_root, new_tree.root(), proof)

    def test_invalid_sizes(self):
        tree = MerkleTree(random_leaves(4, seed=11))
        with pytest.raises(IndexOutOfRange):
            tree.consistency_proof(0, 4)
        with pytest.raises(IndexOutOfRange):
            tree.consistency_proof(3, 5)


class TestKnownVectors:
    # RFC 6962 / Certificate Transparency reference test data
    LEAVES = [
        b"",
        b"\x00",
        b"\x10",
        b"\x20\x21",
        b"\x30\x31",
        b"\x40\x41\x42\x43",
        b"\x50\x51\x52\x53\x54\x55\x56\x57",
        b"\x60\x61\x62\x63\x64\x65\x66\x67\x68\x69\x6a\x6b\x6c\x6d\x6e\x6f",
    ]

    def test_known_roots(self):
        tree = MerkleTree(self.LEAVES)
        assert tree.root_at(1).hex() == (
            "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d"
        )
        assert tree.root_at(8).hex() == (
            "5dc9da79a70659a9ad559cb701ded9a2ab9d823aad2f4960cfe370eff4604328"
        )
