from credsearch.enrich import AliasDirectory, enrich
from credsearch.ledger_model import SchemaData, classify, parse_txn

from .conftest import DID_A, DID_B, make_claim_def, make_nym, make_schema


def test_claim_def_gains_schema_fields():
    schemas = {5: SchemaData(name="ID card", version="1.0", attr_names=("name", "date_of_birth"))}
    entry = classify(parse_txn(make_claim_def(6, DID_B, 5)))
    doc = enrich(entry, schemas, AliasDirectory())
    assert doc.schema_name == "ID card"
    assert doc.schema_version == "1.0"
    assert doc.attr_names == ("name", "date_of_birth")
    assert doc.ref_schema_seq == 5


def test_dangling_reference_tolerated():
    entry = classify(parse_txn(make_claim_def(8, DID_B, 7)))
    doc = enrich(entry, {}, AliasDirectory())
    assert doc.schema_name is None
    assert doc.ref_schema_seq == 7


def test_author_alias_joined():
    aliases = AliasDirectory()
    aliases.record(classify(parse_txn(make_nym(1, DID_B, alias="Desert Schools Credit Union"))))
    entry = classify(parse_txn(make_schema(2, DID_B, "membership card")))
    doc = enrich(entry, {}, aliases)
    assert doc.author_alias == "Desert Schools Credit Union"


def test_unknown_author_leaves_alias_absent():
    entry = classify(parse_txn(make_schema(2, DID_B, "membership card")))
    assert enrich(entry, {}, AliasDirectory()).author_alias is None


def test_schema_doc_fields():
    entry = classify(parse_txn(make_schema(3, DID_B, "ID card", attrs=("name", "age"))))
    doc = enrich(entry, {}, AliasDirectory())
    assert doc.schema_name == "ID card"
    assert doc.attr_names == ("name", "age")
    assert doc.ref_schema_seq is None


def test_nym_doc_carries_declared_alias():
    entry = classify(parse_txn(make_nym(1, DID_A, alias="Phil Windley")))
    doc = enrich(entry, {}, AliasDirectory())
    assert doc.author_alias == "Phil Windley"
    assert doc.schema_name is None


def test_alias_directory_latest_wins():
    aliases = AliasDirectory()
    aliases.record(classify(parse_txn(make_nym(3, DID_A, alias="First Alias"))))
    changed = aliases.record(classify(parse_txn(make_nym(9, DID_A, alias="Second Alias", author=DID_A))))
    assert changed
    assert aliases.alias_of(DID_A) == "Second Alias"
    # an older NYM arriving later does not win
    aliases.record(classify(parse_txn(make_nym(5, DID_A, alias="Stale Alias", author=DID_A))))
    assert aliases.alias_of(DID_A) == "Second Alias"
