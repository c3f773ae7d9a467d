import json

import pytest

from idiom_forge import fixture_path
from idiom_forge.registry import (CONSTRUCTOR, GET, SET, ApiRef, RegistryError, build_registry,
                                  default_literal, load_registry, resolve_member)


def write(tmp_path, doc):
    p = tmp_path / "reg.json"
    p.write_text(json.dumps(doc, indent=1))
    return p


def test_vocab_contains_method_and_both_field_accessors(reg):
    names = [str(a) for a in reg.api_vocab]
    assert "Regex.Match(string)" in names
    assert "get(Match.Success)" in names and "set(Match.Success)" in names
    assert names.index("get(Match.Success)") + 1 == names.index("set(Match.Success)")


def test_empty_type_list(tmp_path):
    r = load_registry(write(tmp_path, {"types": []}))
    assert r.api_vocab == [] and len(r) == 0


def test_vocab_order_follows_file_order(tmp_path):
    doc = {"types": [
        {"name": "B", "fields": [{"name": "x", "type": "int"}], "methods": [{"name": "m", "args": [], "returns": "void"}]},
        {"name": "A", "constructors": [["int"]]},
    ]}
    r = load_registry(write(tmp_path, doc))
    assert [str(a) for a in r.api_vocab] == ["B.m()", "get(B.x)", "set(B.x)", "new A(int)"]


def test_constructor_is_static_new_returning_declaring_type(reg):
    ctor = resolve_member(reg, "StreamReader", "new", ["string"])
    assert ctor == ApiRef("StreamReader", "new", CONSTRUCTOR, ("string",), "StreamReader", True)
    assert str(ctor) == "new StreamReader(string)"


def test_resolve_member_examples(reg):
    assert str(resolve_member(reg, "Regex", "Match", ["string"])) == "Regex.Match(string)"
    assert resolve_member(reg, "Regex", "NoSuchMethod", []) is None
    assert resolve_member(reg, "Nope", "Match", ["string"]) is None


def test_resolve_overloads_by_arity_and_null(reg):
    assert str(resolve_member(reg, "Random", "Next", ["int", "int"])) == "Random.Next(int,int)"
    assert str(resolve_member(reg, "Regex", "new", ["null"])) == "new Regex(string)"
    assert str(resolve_member(reg, "Regex", "new", [None, "RegexOptions"])) == "new Regex(string,RegexOptions)"
    # a value type never accepts null
    assert resolve_member(reg, "Random", "Next", ["null"]) is None


def test_resolve_fields(reg):
    assert resolve_member(reg, "Match", "Success", kind=GET).kind == GET
    assert resolve_member(reg, "Match", "Success", kind=SET).kind == SET


def test_vocab_round_trip(reg):
    for a in reg.api_vocab:
        kind = a.kind if a.kind in (GET, SET) else None
        assert resolve_member(reg, a.declaring_type, a.member, a.arg_types, kind=kind) == a


def test_deterministic_load(reg):
    again = load_registry(fixture_path("registry.json"))
    assert again.api_vocab == reg.api_vocab


def test_default_literal(reg):
    assert default_literal(reg, "string") == "null"
    assert default_literal(reg, "int") == "0"
    assert default_literal(reg, "bool") == "false"
    assert default_literal(reg, "Regex") == "null"
    assert default_literal(reg, "RegexOptions") == "default(RegexOptions)"
    with pytest.raises(RegistryError):
        default_literal(reg, "Missing")


def test_json_error_has_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"types": [\n  {"name": "A",}\n]}')
    with pytest.raises(RegistryError) as e:
        load_registry(p)
    assert e.value.line == 2


@pytest.mark.parametrize("doc, fragment", [
    ({"types": [{"name": "A"}, {"name": "A"}]}, "duplicate type"),
    ({"types": [{"name": "A", "methods": [{"name": "m", "args": ["int"]}, {"name": "m", "args": ["int"]}]}]},
     "duplicate member"),
    ({"types": [{"name": "A", "methods": [{"name": "m", "returns": "Ghost"}]}]}, "unknown type"),
    ({"types": [{"name": "A", "fields": [{"name": "f", "type": "void"}]}]}, "void"),
])
def test_validation_errors(tmp_path, doc, fragment):
    with pytest.raises(RegistryError, match=fragment) as e:
        load_registry(write(tmp_path, doc))
    assert e.value.line is not None


def test_api_ref_json_round_trip(reg):
    for a in reg.api_vocab:
        assert ApiRef.from_json(a.to_json()) == a


def test_build_registry_rejects_bad_kind():
    from idiom_forge.registry import TypeDecl
    with pytest.raises(RegistryError):
        build_registry([TypeDecl("A", "struct")])
