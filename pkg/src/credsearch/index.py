"""Native in-memory full-text engine over enriched ledger documents.

Field-aware inverted index with BM25 ranking, typo tolerance via
Damerau-Levenshtein term expansion, and prefix expansion for partial
input. `brute_force_search` recomputes the same contract by linear scan
and serves as the ground-truth oracle in tests.
"""
from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional

from .enrich import EnrichedDoc
from .ledger_model import TxnType

FIELDS = ("schema_name", "attr_names", "author_alias", "schema_version", "raw_text")

DEFAULT_FIELD_WEIGHTS = {
    "schema_name": 3.0,
    "author_alias": 3.0,
    "attr_names": 2.0,
    "schema_version": 1.0,
    "raw_text": 0.5,
}

BM25_K1 = 1.2
BM25_B = 0.75

_TOKEN_RE = re.compile(r"[0-9a-z]+")


class IndexError_(Exception):
    pass


class DuplicateDocument(IndexError_):
    pass


class UnknownDocument(IndexError_):
    pass


class EmptyQuery(IndexError_):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop tokens shorter than 2 chars."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2]


def damerau_levenshtein(a: str, b: str) -> int:
    """Edit distance counting adjacent transpositions as one operation."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return la + lb
    prev2: list[int] = []
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        prev2, prev = prev, cur
    return prev[lb]


def max_distance_for(term: str) -> int:
    n = len(term)
    if n <= 2:
        return 0
    if n <= 4:
        return 1
    return 2


def expand_against_vocab(vocab: Iterable[str], term: str, present: bool) -> list[tuple[str, int, float]]:
    """All (index term, distance, score scale) a query term expands to.

    Exact presence short-circuits fuzzy expansion entirely. Otherwise
    fuzzy matches within the length-dependent distance budget score at
    1 - d/(d_max+1), and terms the query term strictly prefixes score at
    0.5 (partial-input support); a term qualifying both keeps the higher
    scale.
    """
    if present:
        return [(term, 0, 1.0)]
    d_max = max_distance_for(term)
    out: dict[str, tuple[int, float]] = {}
    for t in vocab:
        scale = 0.0
        dist = 0
        if abs(len(t) - len(term)) <= d_max:
            d = damerau_levenshtein(term, t)
            if d <= d_max:
                scale = 1.0 - d / (d_max + 1)
                dist = d
        if len(t) > len(term) and t.startswith(term) and scale < 0.5:
            scale, dist = 0.5, 0
        if scale > 0.0:
            out[t] = (dist, scale)
    return [(t, d, s) for t, (d, s) in sorted(out.items())]


@dataclass(frozen=True)
class Query:
    text: str
    type_filter: Optional[frozenset[TxnType]] = None
    limit: int = 10
    offset: int = 0
    author: Optional[str] = None  # experimental exact-match DID filter


@dataclass(frozen=True)
class ScoredHit:
    seq_no: int
    score: float
    matched_terms: tuple[tuple[str, str, int], ...]  # (query term, index term, distance)


@dataclass(frozen=True)
class SearchResult:
    total: int
    hits: tuple[ScoredHit, ...]


def doc_field_tokens(doc: EnrichedDoc) -> dict[str, list[str]]:
    return {
        "schema_name": tokenize(doc.schema_name or ""),
        "attr_names": tokenize(" ".join(doc.attr_names)),
        "author_alias": tokenize(doc.author_alias or ""),
        "schema_version": tokenize(doc.schema_version or ""),
        "raw_text": tokenize(doc.raw),
    }


def _bm25(tf: int, df: int, n_docs: int, field_len: int, avg_len: float) -> float:
    idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
    norm = BM25_K1 * (1.0 - BM25_B + BM25_B * field_len / avg_len)
    return idf * tf * (BM25_K1 + 1.0) / (tf + norm)


def _score_docs(
    doc_ids: Iterable[int],
    query_terms: list[str],
    expansions: dict[str, list[tuple[str, int, float]]],
    tf_of,
    field_len_of,
    df: dict[str, dict[str, int]],
    avg_len: dict[str, float],
    n_docs: int,
    weights: dict[str, float],
) -> list[ScoredHit]:
    """Shared scoring loop; both the indexed and brute-force paths feed it
    so float accumulation order is identical by construction."""
    hits = []
    for seq in doc_ids:
        score = 0.0
        matched: list[tuple[str, str, int]] = []
        for qt in query_terms:
            for mt, dist, scale in expansions[qt]:
                mt_matched = False
                for f in FIELDS:
                    tf = tf_of(mt, f, seq)
                    if tf == 0:
                        continue
                    score += weights[f] * scale * _bm25(
                        tf, df[f].get(mt, 0), n_docs, field_len_of(seq, f), avg_len[f]
                    )
                    mt_matched = True
                if mt_matched and (qt, mt, dist) not in matched:
                    matched.append((qt, mt, dist))
        if score > 0.0:
            hits.append(ScoredHit(seq, score, tuple(matched)))
    hits.sort(key=lambda h: (-h.score, h.seq_no))
    return hits


class InvertedIndex:
    """Term -> postings with per-field statistics.

    Single-writer / many-reader: mutations and searches take the same
    lock, so a reader always observes a batch boundary. `version` bumps
    on every mutation and lets callers invalidate caches.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        # term -> field -> {seq_no: tf}
        self._postings: dict[str, dict[str, dict[int, int]]] = {}
        self._doc_field_len: dict[int, dict[str, int]] = {}
        self._field_total_len: dict[str, int] = {f: 0 for f in FIELDS}
        self._docs: dict[int, EnrichedDoc] = {}
        self.version = 0

    @property
    def doc_count(self) -> int:
        return len(self._docs)

    def get(self, seq_no: int) -> Optional[EnrichedDoc]:
        with self._lock:
            return self._docs.get(seq_no)

    def documents(self) -> list[EnrichedDoc]:
        with self._lock:
            return [self._docs[s] for s in sorted(self._docs)]

    def add_document(self, doc: EnrichedDoc) -> None:
        with self._lock:
            if doc.seq_no in self._docs:
                raise DuplicateDocument(f"seq {doc.seq_no} already indexed")
            fields = doc_field_tokens(doc)
            for f, tokens in fields.items():
                for t in tokens:
                    self._postings.setdefault(t, {}).setdefault(f, {})
                    self._postings[t][f][doc.seq_no] = self._postings[t][f].get(doc.seq_no, 0) + 1
                self._doc_field_len.setdefault(doc.seq_no, {})[f] = len(tokens)
                self._field_total_len[f] += len(tokens)
            self._docs[doc.seq_no] = doc
            self.version += 1

    def remove_document(self, seq_no: int) -> None:
        with self._lock:
            doc = self._docs.get(seq_no)
            if doc is None:
                raise UnknownDocument(f"seq {seq_no} not indexed")
            fields = doc_field_tokens(doc)
            for f, tokens in fields.items():
                for t in set(tokens):
                    by_field = self._postings[t]
                    del by_field[f][seq_no]
                    if not by_field[f]:
                        del by_field[f]
                    if not by_field:
                        del self._postings[t]
                self._field_total_len[f] -= len(tokens)
            del self._doc_field_len[seq_no]
            del self._docs[seq_no]
            self.version += 1

    def expand_term(self, term: str) -> list[tuple[str, int, float]]:
        with self._lock:
            return expand_against_vocab(self._postings.keys(), term, term in self._postings)

    def search(self, q: Query, weights: Optional[dict[str, float]] = None) -> SearchResult:
        weights = weights or DEFAULT_FIELD_WEIGHTS
        with self._lock:
            query_terms = tokenize(q.text)
            if not query_terms:
                raise EmptyQuery("query yields no tokens after analysis")
            expansions = {
                qt: expand_against_vocab(self._postings.keys(), qt, qt in self._postings)
                for qt in set(query_terms)
            }
            candidates: set[int] = set()
            for exp in expansions.values():
                for mt, _, _ in exp:
                    for by_doc in self._postings.get(mt, {}).values():
                        candidates.update(by_doc)
            if q.type_filter is not None:
                candidates = {s for s in candidates if self._docs[s].txn_type in q.type_filter}
            if q.author is not None:
                candidates = {s for s in candidates if self._docs[s].author_did == q.author}

            n_docs = len(self._docs)
            avg_len = {
                f: (self._field_total_len[f] / n_docs) if n_docs else 0.0 for f in FIELDS
            }
            needed = {mt for exp in expansions.values() for mt, _, _ in exp}
            df = {
                f: {
                    t: len(self._postings[t][f])
                    for t in needed
                    if f in self._postings.get(t, {})
                }
                for f in FIELDS
            }

            def tf_of(term: str, f: str, seq: int) -> int:
                return self._postings.get(term, {}).get(f, {}).get(seq, 0)

            def field_len_of(seq: int, f: str) -> int:
                return self._doc_field_len[seq][f]

            hits = _score_docs(
                sorted(candidates), query_terms, expansions, tf_of, field_len_of,
                df, avg_len, n_docs, weights,
            )
            return SearchResult(
                total=len(hits),
                hits=tuple(hits[q.offset : q.offset + q.limit]),
            )


def brute_force_search(
    docs: list[EnrichedDoc], q: Query, weights: Optional[dict[str, float]] = None
) -> SearchResult:
    """Ground-truth search: same contract as InvertedIndex.search, computed
    by linear scan with per-term edit distances and directly recounted
    statistics."""
    weights = weights or DEFAULT_FIELD_WEIGHTS
    query_terms = tokenize(q.text)
    if not query_terms:
        raise EmptyQuery("query yields no tokens after analysis")

    per_doc_fields = {d.seq_no: doc_field_tokens(d) for d in docs}
    vocab: set[str] = set()
    for fields in per_doc_fields.values():
        for tokens in fields.values():
            vocab.update(tokens)

    expansions = {
        qt: expand_against_vocab(sorted(vocab), qt, qt in vocab) for qt in set(query_terms)
    }

    n_docs = len(docs)
    df: dict[str, dict[str, int]] = {f: {} for f in FIELDS}
    total_len = {f: 0 for f in FIELDS}
    tf_table: dict[int, dict[str, dict[str, int]]] = {}
    for d in docs:
        tf_table[d.seq_no] = {}
        for f, tokens in per_doc_fields[d.seq_no].items():
            counts: dict[str, int] = {}
            for t in tokens:
                counts[t] = counts.get(t, 0) + 1
            tf_table[d.seq_no][f] = counts
            total_len[f] += len(tokens)
            for t in counts:
                df[f][t] = df[f].get(t, 0) + 1
    avg_len = {f: (total_len[f] / n_docs) if n_docs else 0.0 for f in FIELDS}

    by_seq = {d.seq_no: d for d in docs}
    doc_ids = sorted(
        s
        for s, d in by_seq.items()
        if (q.type_filter is None or d.txn_type in q.type_filter)
        and (q.author is None or d.author_did == q.author)
    )

    def tf_of(term: str, f: str, seq: int) -> int:
        return tf_table[seq][f].get(term, 0)

    def field_len_of(seq: int, f: str) -> int:
        return len(per_doc_fields[seq][f])

    hits = _score_docs(
        doc_ids, query_terms, expansions, tf_of, field_len_of, df, avg_len, n_docs, weights
    )
    return SearchResult(total=len(hits), hits=tuple(hits[q.offset : q.offset + q.limit]))
