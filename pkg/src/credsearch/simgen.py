"""Deterministic synthetic domain-ledger generator.

Stands in for a real verifiable data registry. The same config always
produces a byte-identical ledger: transaction 1 is a fixed NYM with alias
"Phil Windley" (mirroring the mainnet's first transaction), later
transactions are NYMs, SCHEMAs, CLAIM_DEFs and ATTRIBs whose references
always point backwards, as on a real ledger.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .ledger_model import TxnEnvelope, canonical_json, parse_txn
from .merkle import MerkleTree

_BASE58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"

GENESIS_DID = "FzAaV9Waa1DccDa72qwg13"  # fixed author of the genesis NYM
GENESIS_ALIAS = "Phil Windley"

DEFAULT_ALIAS_VOCAB = (
    "Desert Schools Credit Union",
    "Bank of Bonifay",
    "Technical University Berlin",
    "City Savings Bank",
    "Evernym",
    "Sovrin Foundation",
    "Province of Utopia",
    "Acme Insurance Group",
    "Metro Housing Platform",
    "Northern Medical Council",
)

DEFAULT_SCHEMA_NAMES = (
    "ID card",
    "proof of employment",
    "proof of matriculation",
    "proof of income",
    "drivers license",
    "university degree",
    "credit score",
    "student ID",
    "membership card",
    "health insurance card",
)

DEFAULT_ATTR_VOCAB = (
    "name",
    "company",
    "title",
    "date_of_birth",
    "address",
    "salary",
    "university",
    "degree",
    "enrollment_year",
    "member_id",
    "expiry_date",
    "nationality",
)

# Default type mix for count-driven generation (NYM, SCHEMA, CLAIM_DEF, ATTRIB).
DEFAULT_TYPE_MIX = (0.60, 0.15, 0.20, 0.05)


class InvalidConfig(Exception):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 42
    n_orgs: int = 10
    n_schemas: int = 20
    claim_defs_per_schema: int = 2
    n_attribs: int = 0
    count: int | None = None  # when set, overrides the counts above using type_mix
    type_mix: tuple[float, float, float, float] = DEFAULT_TYPE_MIX
    alias_vocab: tuple[str, ...] = DEFAULT_ALIAS_VOCAB
    schema_name_vocab: tuple[str, ...] = DEFAULT_SCHEMA_NAMES
    attr_vocab: tuple[str, ...] = DEFAULT_ATTR_VOCAB


@dataclass
class SimLedger:
    envelopes: list[TxnEnvelope] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.envelopes)

    def root(self) -> bytes:
        from .ledger_model import canonical_leaf_bytes

        tree = MerkleTree()
        for env in self.envelopes:
            tree.append(canonical_leaf_bytes(env))
        return tree.root()


def _rand_did(rng: random.Random) -> str:
    return "".join(rng.choice(_BASE58) for _ in range(rng.choice((21, 22))))


def _rand_hex(rng: random.Random, n: int) -> str:
    return "".join(rng.choice("0123456789abcdef") for _ in range(n))


class _Builder:
    def __init__(self, cfg: GeneratorConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.raws: list[str] = []
        self.org_dids: list[str] = []
        self.schema_seqs: list[int] = []
        self.schema_attr_pool: dict[int, tuple[str, ...]] = {}
        self._alias_cursor = 0

    def _next_seq(self) -> int:
        return len(self.raws) + 1

    def _emit(self, doc: dict) -> None:
        self.raws.append(canonical_json(doc))

    def _next_alias(self) -> str:
        vocab = self.cfg.alias_vocab
        i = self._alias_cursor
        self._alias_cursor += 1
        alias = vocab[i % len(vocab)]
        if i >= len(vocab):
            alias = f"{alias} {i // len(vocab) + 1}"
        return alias

    def genesis_nym(self) -> None:
        doc = {
            "txn": {
                "type": "1",
                "metadata": {"from": GENESIS_DID},
                "data": {"dest": GENESIS_DID, "alias": GENESIS_ALIAS, "role": "0"},
            },
            "txnMetadata": {"seqNo": self._next_seq(), "txnTime": 1530000000},
        }
        self._emit(doc)

    def nym(self) -> None:
        dest = _rand_did(self.rng)
        author = GENESIS_DID if not self.org_dids else self.rng.choice(self.org_dids + [GENESIS_DID])
        doc = {
            "txn": {
                "type": "1",
                "metadata": {"from": author},
                "data": {"dest": dest, "alias": self._next_alias(), "role": "101"},
            },
            "txnMetadata": {"seqNo": self._next_seq(), "txnTime": 1530000000 + self._next_seq()},
        }
        self._emit(doc)
        self.org_dids.append(dest)

    def schema(self) -> None:
        author = self.rng.choice(self.org_dids) if self.org_dids else GENESIS_DID
        name = self.rng.choice(self.cfg.schema_name_vocab)
        n_attrs = self.rng.randint(2, min(6, len(self.cfg.attr_vocab)))
        attrs = self.rng.sample(list(self.cfg.attr_vocab), n_attrs)
        version = f"{self.rng.randint(1, 3)}.{self.rng.randint(0, 9)}"
        seq = self._next_seq()
        doc = {
            "txn": {
                "type": "101",
                "metadata": {"from": author},
                "data": {"data": {"name": name, "version": version, "attr_names": attrs}},
            },
            "txnMetadata": {"seqNo": seq, "txnTime": 1530000000 + seq},
        }
        self._emit(doc)
        self.schema_seqs.append(seq)
        self.schema_attr_pool[seq] = tuple(attrs)

    def claim_def(self, schema_seq: int | None = None) -> None:
        ref = schema_seq if schema_seq is not None else self.rng.choice(self.schema_seqs)
        author = self.rng.choice(self.org_dids) if self.org_dids else GENESIS_DID
        seq = self._next_seq()
        doc = {
            "txn": {
                "type": "102",
                "metadata": {"from": author},
                "data": {
                    "ref": ref,
                    "signature_type": "CL",
                    "tag": f"tag{self.rng.randint(1, 9)}",
                    "data": {"primary": {"n": _rand_hex(self.rng, 32)}},
                },
            },
            "txnMetadata": {"seqNo": seq, "txnTime": 1530000000 + seq},
        }
        self._emit(doc)

    def attrib(self) -> None:
        author = self.rng.choice(self.org_dids) if self.org_dids else GENESIS_DID
        seq = self._next_seq()
        doc = {
            "txn": {
                "type": "100",
                "metadata": {"from": author},
                "data": {"dest": author, "raw": canonical_json({"endpoint": f"https://agent{seq}.example"})},
            },
            "txnMetadata": {"seqNo": seq, "txnTime": 1530000000 + seq},
        }
        self._emit(doc)


def generate(cfg: GeneratorConfig) -> SimLedger:
    """Build a valid synthetic ledger honoring all reference invariants."""
    if cfg.claim_defs_per_schema < 0 or cfg.n_orgs < 0 or cfg.n_schemas < 0:
        raise InvalidConfig("counts must be non-negative")
    if cfg.n_schemas > 0 and not cfg.schema_name_vocab:
        raise InvalidConfig("schema_name_vocab empty but n_schemas > 0")
    if cfg.n_orgs > 0 and not cfg.alias_vocab:
        raise InvalidConfig("alias_vocab empty but n_orgs > 0")
    if cfg.count is not None and cfg.count < 1:
        raise InvalidConfig("count must be >= 1 (the genesis NYM always exists)")
    if cfg.count is not None and (len(cfg.type_mix) != 4 or any(w < 0 for w in cfg.type_mix) or sum(cfg.type_mix) <= 0):
        raise InvalidConfig("type_mix must be four non-negative weights")

    b = _Builder(cfg)
    b.genesis_nym()

    if cfg.count is not None:
        _fill_to_count(b, cfg.count)
    else:
        for _ in range(cfg.n_orgs):
            b.nym()
        for _ in range(cfg.n_schemas):
            b.schema()
            for _ in range(cfg.claim_defs_per_schema):
                b.claim_def(b.schema_seqs[-1])
        for _ in range(cfg.n_attribs):
            b.attrib()

    return SimLedger(envelopes=[parse_txn(raw) for raw in b.raws])


def _fill_to_count(b: _Builder, count: int) -> None:
    kinds = ("nym", "schema", "claim_def", "attrib")
    while len(b.raws) < count:
        kind = b.rng.choices(kinds, weights=b.cfg.type_mix)[0]
        # CLAIM_DEF needs an existing SCHEMA; SCHEMA/ATTRIB prefer an org author
        if kind == "claim_def" and not b.schema_seqs:
            kind = "schema"
        if kind == "schema" and not b.org_dids:
            kind = "nym"
        getattr(b, kind)()
