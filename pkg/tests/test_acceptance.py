"""Acceptance suite: one test per criterion, each enforcing its stated
runtime bound and printing a PASS line on success (run with -s to see
them live)."""
import json
import random
import shutil
import time

import httpx
import pytest

from credsearch.api import create_app
from credsearch.bench import BenchConfig, run_bench
from credsearch.index import InvertedIndex, Query, brute_force_search
from credsearch.ledger_model import ClaimDefData, SchemaData, TxnType, classify, parse_txn
from credsearch.simgen import GeneratorConfig, generate
from credsearch.simserver import SimSource, create_sim_app
from credsearch.sync import SyncService

from .conftest import DID_B, ServerThread, make_schema, replay_docs


def report(name):
    print(f"\nACCEPTANCE {name}: PASS")


@pytest.fixture(scope="module")
def big_corpus(tmp_path_factory):
    """47312-transaction synthetic corpus, ingested once for the module."""
    data_dir = tmp_path_factory.mktemp("big")
    svc = SyncService(data_dir, "http://unused.invalid")
    ledger = generate(GeneratorConfig(seed=71, count=47312))
    svc.verify_and_append(list(ledger.envelopes))
    return svc, data_dir


class TestTypoRetrieval:
    def test_phil_wimdley_returns_genesis_nym(self, tmp_path):
        svc = SyncService(tmp_path, "http://unused.invalid")
        ledger = generate(GeneratorConfig(seed=81, count=200))
        svc.verify_and_append(list(ledger.envelopes))
        with ServerThread(create_app(svc)) as srv:
            started = time.monotonic()
            resp = httpx.get(f"{srv.url}/search", params={"q": "Phil Wimdley"})
            elapsed = time.monotonic() - started
        assert resp.status_code == 200
        hits = resp.json()["hits"]
        assert hits, "typo query must return results"
        assert hits[0]["seq_no"] == 1
        assert hits[0]["author_alias"] == "Phil Windley"
        assert elapsed < 1.0, f"typo retrieval took {elapsed:.2f}s"
        report("typo retrieval (Phil Wimdley -> seq 1)")


# schema names pairwise term-disjoint from each other, the alias vocabulary
# and the attribute vocabulary, so the joined schema-name field is the only
# place the query terms occur in claim-def documents
JOIN_SCHEMA_NAMES = (
    "drivers license",
    "parking permit",
    "boatmasters certificate",
    "vaccination record",
    "tax clearance",
)


class TestEnrichmentJoin:
    def test_claim_def_search_equals_brute_force_rejoin(self, tmp_path):
        started = time.monotonic()
        ledger = generate(
            GeneratorConfig(seed=82, count=10_000, schema_name_vocab=JOIN_SCHEMA_NAMES)
        )
        svc = SyncService(tmp_path, "http://unused.invalid")
        svc.verify_and_append(list(ledger.envelopes))

        # independent re-join over the raw ledger copy on disk
        raw_lines = (tmp_path / "ledger.ndjson").read_text().splitlines()
        schema_names = {}
        expected: dict[str, set[int]] = {name: set() for name in JOIN_SCHEMA_NAMES}
        for line in raw_lines:
            entry = classify(parse_txn(line))
            if isinstance(entry.payload, SchemaData):
                schema_names[entry.envelope.seq_no] = entry.payload.name
            elif isinstance(entry.payload, ClaimDefData):
                name = schema_names.get(entry.payload.schema_ref)
                if name in expected:
                    expected[name].add(entry.envelope.seq_no)

        with ServerThread(create_app(svc)) as srv:
            for name in JOIN_SCHEMA_NAMES:
                resp = httpx.get(
                    f"{srv.url}/search",
                    params={"q": name, "type": "claim_def", "limit": 1000},
                )
                assert resp.status_code == 200
                body = resp.json()
                got = {h["seq_no"] for h in body["hits"]}
                assert body["total"] <= 1000, "corpus sized so one page holds all hits"
                assert got == expected[name], f"join mismatch for {name!r}"
        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"enrichment join check took {elapsed:.2f}s"
        report("enrichment join (claim_def by schema name, exact set equality)")


class TestFiveQueryClasses:
    def test_bench_47312_corpus(self, big_corpus, tmp_path):
        svc, data_dir = big_corpus
        started = time.monotonic()
        with ServerThread(create_app(svc)) as srv:
            config = BenchConfig(
                target_url=srv.url,
                connections=400,
                duration=3.0,
                data_dir=str(data_dir),
            )
            bench_report = run_bench(config)
        out = tmp_path / "bench.csv"
        bench_report.write_csv(out)
        print("\n" + bench_report.table())
        assert len(bench_report.classes) == 5
        assert bench_report.corpus_size == 47312
        for result in bench_report.classes:
            assert result.errors == 0, f"{result.name}: {result.errors} errors"
            assert result.mismatches == 0, f"{result.name}: semantic mismatches"
            assert result.samples_validated > 0
            assert result.req_per_sec > 0
        fastest = max(r.req_per_sec for r in bench_report.classes)
        assert fastest >= 2000, f"fastest class only {fastest:.0f} req/s"
        assert out.exists() and len(out.read_text().splitlines()) == 6
        elapsed = time.monotonic() - started
        assert elapsed < 300, f"bench criterion took {elapsed:.0f}s"
        report(f"five query classes (fastest {fastest:.0f} req/s, zero errors/mismatches)")


class TestOracleEquivalence:
    QUERIES = (
        "id card",
        "ID crad",
        "phil wimdley",
        "desert schools credit union",
        "proof of employ",
        "company title",
        "matriculatoin",
        "health insurance",
    )

    def test_200_randomized_pairs(self):
        started = time.monotonic()
        rng = random.Random(7)
        pairs = 0
        for _ in range(25):
            count = rng.randint(1, 2000)
            docs = replay_docs(generate(GeneratorConfig(seed=rng.randint(0, 10**6), count=count)).envelopes)
            idx = InvertedIndex()
            for d in docs:
                idx.add_document(d)
            for qtext in self.QUERIES:
                q = Query(
                    text=qtext,
                    type_filter=rng.choice(
                        [None, None, frozenset({TxnType.SCHEMA, TxnType.CLAIM_DEF})]
                    ),
                    limit=10,
                )
                fast = idx.search(q)
                slow = brute_force_search(docs, q)
                assert [h.seq_no for h in fast.hits] == [h.seq_no for h in slow.hits]
                for a, b in zip(fast.hits, slow.hits):
                    assert abs(a.score - b.score) < 1e-9
                scores = [(h.seq_no, h.score) for h in fast.hits]
                assert scores == sorted(scores, key=lambda x: (-x[1], x[0]))
                pairs += 1
        assert pairs == 200
        elapsed = time.monotonic() - started
        assert elapsed < 120, f"oracle equivalence took {elapsed:.0f}s"
        report(f"oracle equivalence (200 pairs in {elapsed:.0f}s)")


class TestTamperEvidence:
    def test_any_flipped_byte_halts_service(self, tmp_path):
        started = time.monotonic()
        pristine = tmp_path / "pristine"
        svc = SyncService(pristine, "http://unused.invalid")
        ledger = generate(GeneratorConfig(seed=83, count=256))
        svc.verify_and_append(list(ledger.envelopes))

        ledger_file = pristine / "ledger.ndjson"
        data = ledger_file.read_bytes()
        # byte offsets of each transaction line
        offsets = []
        pos = 0
        for line in data.split(b"\n")[:-1]:
            offsets.append((pos, len(line)))
            pos += len(line) + 1

        work = tmp_path / "work"
        rng = random.Random(42)
        detected = 0
        for txn_i, (start, length) in enumerate(offsets):
            for byte_pos in rng.sample(range(length), k=min(3, length)):
                mutated = bytearray(data)
                mutated[start + byte_pos] ^= 1 << rng.randint(0, 7)
                if work.exists():
                    shutil.rmtree(work)
                work.mkdir()
                (work / "ledger.ndjson").write_bytes(bytes(mutated))
                shutil.copy(pristine / "checkpoint.json", work / "checkpoint.json")
                tampered_svc = SyncService(work, "http://unused.invalid")
                assert tampered_svc.phase == "fatal", f"txn {txn_i + 1} byte {byte_pos} undetected"
                detected += 1

        # the halted service refuses to serve over HTTP
        with ServerThread(create_app(tampered_svc)) as srv:
            resp = httpx.get(f"{srv.url}/search", params={"q": "phil"})
            assert resp.status_code == 503
            stats = httpx.get(f"{srv.url}/stats").json()
            assert stats["sync_phase"] == "fatal"

        elapsed = time.monotonic() - started
        assert elapsed < 120, f"tamper evidence took {elapsed:.0f}s"
        report(f"tamper evidence ({detected} mutations across 256 txns all detected)")


class TestSyncLiveness:
    def test_posted_schema_searchable_within_two_polls(self, tmp_path):
        ledger = generate(GeneratorConfig(seed=84, count=20))
        source = SimSource(ledger, mutable=True)
        with ServerThread(create_sim_app(source)) as sim_srv:
            svc = SyncService(tmp_path, sim_srv.url, poll_interval=1.0)
            svc.start()
            try:
                deadline = time.time() + 10
                while svc.last_seq < 20 and time.time() < deadline:
                    time.sleep(0.02)
                assert svc.phase == "steady"
                with ServerThread(create_app(svc)) as api_srv:
                    raw = make_schema(21, DID_B, "zeppelin pilot certificate")
                    posted = time.monotonic()
                    httpx.post(f"{sim_srv.url}/txns", content=raw).raise_for_status()
                    found_at = None
                    while time.monotonic() - posted < 5:
                        resp = httpx.get(
                            f"{api_srv.url}/search", params={"q": "zeppelin pilot"}
                        )
                        if resp.status_code == 200 and any(
                            h["seq_no"] == 21 for h in resp.json()["hits"]
                        ):
                            found_at = time.monotonic() - posted
                            break
                        time.sleep(0.05)
                    assert found_at is not None, "posted schema never became searchable"
                    assert found_at < 2.5, f"took {found_at:.2f}s (> 2s + round trip)"
            finally:
                svc.stop()
        report(f"sync liveness (searchable after {found_at:.2f}s)")


class TestRestartDeterminism:
    def test_interrupted_catchup_converges(self, tmp_path):
        started = time.monotonic()
        ledger = generate(GeneratorConfig(seed=85, count=10_000))
        with ServerThread(create_sim_app(SimSource(ledger))) as srv:
            # uninterrupted reference run
            ref_dir = tmp_path / "ref"
            ref = SyncService(ref_dir, srv.url, batch_size=1000)
            ref.sync_once()
            ref_stats = (ref.last_seq, ref.tree.root().hex(), ref.index.doc_count)

            # interrupted run: stop mid-catch-up, then simulate a torn write
            cut_dir = tmp_path / "cut"
            first = SyncService(cut_dir, srv.url, batch_size=200)

            class CuttingClient(httpx.Client):
                """Requests the stop flag after a handful of batches, as if
                the process had been killed between appends."""

                calls = 0

                def get(self, *args, **kwargs):
                    CuttingClient.calls += 1
                    if CuttingClient.calls > 6:
                        first._stop.set()
                    return super().get(*args, **kwargs)

            with CuttingClient() as client:
                first.sync_once(client=client)
            assert 0 < first.last_seq < 10_000, "should have been interrupted mid-catch-up"
            with open(cut_dir / "ledger.ndjson", "a") as f:
                f.write(ledger.envelopes[first.last_seq].raw[:40])  # killed mid-append

            second = SyncService(cut_dir, srv.url, batch_size=1000)
            assert second.phase != "fatal"
            second.sync_once()
            assert (second.last_seq, second.tree.root().hex(), second.index.doc_count) == ref_stats
        elapsed = time.monotonic() - started
        assert elapsed < 60, f"restart determinism took {elapsed:.0f}s"
        report("restart determinism (interrupted catch-up converges to identical state)")
