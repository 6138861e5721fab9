"""Load-generation harness for the search service.

Replays five fixed query classes over many concurrent keep-alive
connections and reports requests/second and latency percentiles per
class. Built in-repo instead of using an external load tool so a sample
of responses can be validated semantically against the brute-force
search oracle, not just for status codes.
"""
from __future__ import annotations

import asyncio
import csv
import json
import math
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional
from urllib.parse import quote, urlsplit

from .index import Query, brute_force_search
from .ledger_model import TxnType

SAMPLE_EVERY = 100  # 1% of responses are kept for semantic validation


class TargetUnreachable(Exception):
    pass


@dataclass(frozen=True)
class QueryClass:
    name: str
    q: str
    type_name: str  # "any" or a transaction type name


# Concrete representatives of the five evaluated query classes:
# 1) schemas or credential definitions by schema name
# 2) schemas by schema name
# 3) transactions from a specific person, with a typo in the name
# 4) credential definitions by schema name
# 5) credential definitions by attribute name
DEFAULT_CLASSES = (
    QueryClass("schema_or_claim_def_by_schema_name", "ID card", "any"),
    QueryClass("schema_by_schema_name", "ID card", "schema"),
    QueryClass("person_with_typo", "Phil Wimdley", "any"),
    QueryClass("claim_def_by_schema_name", "ID card", "claim_def"),
    QueryClass("claim_def_by_attribute_name", "company", "claim_def"),
)

_TYPE_BY_NAME = {
    "nym": TxnType.NYM,
    "attrib": TxnType.ATTRIB,
    "schema": TxnType.SCHEMA,
    "claim_def": TxnType.CLAIM_DEF,
}


@dataclass(frozen=True)
class BenchConfig:
    target_url: str
    connections: int = 400
    duration: float = 30.0  # seconds per query class
    limit: int = 10
    data_dir: Optional[str] = None  # ledger copy used for semantic validation
    classes: tuple[QueryClass, ...] = DEFAULT_CLASSES

    def __post_init__(self):
        if self.connections < 1:
            raise ValueError("connections must be >= 1")
        if self.duration < 1:
            raise ValueError("duration must be >= 1 second")


@dataclass
class ClassResult:
    name: str
    requests: int = 0
    errors: int = 0
    req_per_sec: float = 0.0
    p50_ms: float = 0.0
    p99_ms: float = 0.0
    samples_validated: int = 0
    mismatches: int = 0


@dataclass
class BenchReport:
    classes: list[ClassResult] = field(default_factory=list)
    corpus_size: int = 0
    machine_note: str = ""

    @property
    def passed(self) -> bool:
        return all(c.errors == 0 and c.mismatches == 0 for c in self.classes)

    def table(self) -> str:
        lines = [
            f"corpus: {self.corpus_size} docs   machine: {self.machine_note}",
            f"{'class':<40} {'req/s':>10} {'p50 ms':>8} {'p99 ms':>8} {'errors':>7} {'mismatch':>9}",
        ]
        for c in self.classes:
            lines.append(
                f"{c.name:<40} {c.req_per_sec:>10.0f} {c.p50_ms:>8.2f} "
                f"{c.p99_ms:>8.2f} {c.errors:>7} {c.mismatches:>9}"
            )
        return "\n".join(lines)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["class", "req_per_sec", "p50_ms", "p99_ms", "requests", "errors", "mismatches"])
            for c in self.classes:
                w.writerow(
                    [c.name, f"{c.req_per_sec:.1f}", f"{c.p50_ms:.3f}", f"{c.p99_ms:.3f}",
                     c.requests, c.errors, c.mismatches]
                )


def _percentile(sorted_vals: list[float], p: float) -> float:
    if not sorted_vals:
        return 0.0
    i = min(len(sorted_vals) - 1, max(0, math.ceil(p * len(sorted_vals)) - 1))
    return sorted_vals[i]


async def _worker(
    host: str, port: int, request: bytes, deadline: float,
    latencies: list[float], samples: list[bytes], errors: list[int],
) -> int:
    try:
        reader, writer = await asyncio.open_connection(host, port)
    except OSError as exc:
        raise TargetUnreachable(str(exc)) from exc
    count = 0
    buf = b""
    try:
        while time.monotonic() < deadline:
            t0 = time.monotonic()
            writer.write(request)
            await writer.drain()
            while b"\r\n\r\n" not in buf:
                chunk = await reader.read(65536)
                if not chunk:
                    raise ConnectionError("server closed connection")
                buf += chunk
            head, _, rest = buf.partition(b"\r\n\r\n")
            status = int(head.split(b" ", 2)[1])
            length = 0
            for line in head.split(b"\r\n"):
                if line.lower().startswith(b"content-length:"):
                    length = int(line.split(b":", 1)[1])
            while len(rest) < length:
                chunk = await reader.read(65536)
                if not chunk:
                    raise ConnectionError("server closed connection")
                rest += chunk
            body, buf = rest[:length], rest[length:]
            latencies.append(time.monotonic() - t0)
            if status != 200:
                errors[0] += 1
            elif count % SAMPLE_EVERY == 0:
                samples.append(body)
            count += 1
    except (ConnectionError, OSError):
        errors[0] += 1
    finally:
        writer.close()
    return count


def _expected_for(qc: QueryClass, docs, limit: int) -> list[tuple[int, float]]:
    type_filter = None
    if qc.type_name != "any":
        type_filter = frozenset({_TYPE_BY_NAME[qc.type_name]})
    result = brute_force_search(docs, Query(text=qc.q, type_filter=type_filter, limit=limit))
    return [(h.seq_no, h.score) for h in result.hits]


def _validate_samples(samples: list[bytes], expected: list[tuple[int, float]]) -> int:
    mismatches = 0
    for body in samples:
        try:
            got = [(h["seq_no"], h["score"]) for h in json.loads(body)["hits"]]
        except (ValueError, KeyError):
            mismatches += 1
            continue
        if len(got) != len(expected) or any(
            g[0] != e[0] or abs(g[1] - e[1]) > 1e-9 for g, e in zip(got, expected)
        ):
            mismatches += 1
    return mismatches


def run_bench(config: BenchConfig) -> BenchReport:
    parts = urlsplit(config.target_url)
    host, port = parts.hostname or "127.0.0.1", parts.port or 80

    oracle_docs = None
    if config.data_dir:
        from .sync import SyncService

        svc = SyncService(config.data_dir, source_url="http://offline.invalid")
        oracle_docs = svc.index.documents()

    report = BenchReport(
        corpus_size=len(oracle_docs) if oracle_docs is not None else 0,
        machine_note=f"{platform.system()} {platform.machine()}, {platform.python_implementation()} {platform.python_version()}",
    )

    for qc in config.classes:
        target = f"/search?q={quote(qc.q)}&type={qc.type_name}&limit={config.limit}"
        request = (
            f"GET {target} HTTP/1.1\r\nHost: {host}\r\nConnection: keep-alive\r\n\r\n"
        ).encode()
        latencies: list[float] = []
        samples: list[bytes] = []
        errors = [0]

        async def run_class() -> int:
            deadline = time.monotonic() + config.duration
            counts = await asyncio.gather(
                *(
                    _worker(host, port, request, deadline, latencies, samples, errors)
                    for _ in range(config.connections)
                )
            )
            return sum(counts)

        started = time.monotonic()
        total = asyncio.run(run_class())
        elapsed = time.monotonic() - started

        latencies.sort()
        result = ClassResult(
            name=qc.name,
            requests=total,
            errors=errors[0],
            req_per_sec=total / elapsed if elapsed > 0 else 0.0,
            p50_ms=_percentile(latencies, 0.50) * 1000,
            p99_ms=_percentile(latencies, 0.99) * 1000,
        )
        if oracle_docs is not None:
            expected = _expected_for(qc, oracle_docs, config.limit)
            result.samples_validated = len(samples)
            result.mismatches = _validate_samples(samples, expected)
        report.classes.append(result)
    return report
