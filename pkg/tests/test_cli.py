import json

import pytest

from idiom_forge import __version__, fixture_path
from idiom_forge.align import initial_table, load_model, read_clicks
from idiom_forge.cli import main
from idiom_forge.extract import INDEX_FILE, NAMES_FILE
from idiom_forge.registry import load_registry

REGEX_KEY = "Regex.Match(string);if(get(Match.Success)){get(Match.Groups)}else{}"
REGISTRY = str(fixture_path("registry.json"))


def extract_args(out):
    return ["-q", "extract", "--corpus", str(fixture_path("corpus")), "--registry", REGISTRY, "--out", str(out)]


def train_args(out, *extra):
    return ["-q", "train", "--clicks", str(fixture_path("clicks.tsv")), "--docs", str(fixture_path("docs")),
            "--registry", REGISTRY, "--out", str(out), *extra]


def query_args(art, *extra):
    return ["-q", "query", "--model", str(art / "model.json"), "--index", str(art / "index"),
            "--registry", REGISTRY, *extra]


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    d = tmp_path_factory.mktemp("artifacts")
    assert main(extract_args(d / "index")) == 0
    assert main(train_args(d / "model.json")) == 0
    return d


def test_extract_creates_index_files(tmp_path, capsys):
    assert main(extract_args(tmp_path / "idx")[1:]) == 0
    assert (tmp_path / "idx" / INDEX_FILE).is_file()
    assert (tmp_path / "idx" / NAMES_FILE).is_file()
    err = capsys.readouterr().err
    assert "20 files" in err and "0 skipped" in err


def test_extract_empty_corpus_fails(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    args = ["extract", "--corpus", str(tmp_path / "empty"), "--registry", REGISTRY, "--out", str(tmp_path / "o")]
    assert main(args) == 1
    assert "no *.mini files" in capsys.readouterr().err


def test_query_before_train_is_actionable(tmp_path, capsys):
    assert main(extract_args(tmp_path / "index")) == 0
    rc = main(query_args(tmp_path, "--text", "match regular expression"))
    assert rc != 0
    err = capsys.readouterr().err
    assert "model" in err and "idiom-forge train" in err


def test_missing_registry(tmp_path, capsys):
    args = ["extract", "--corpus", str(fixture_path("corpus")), "--registry", str(tmp_path / "nope.json"),
            "--out", str(tmp_path / "o")]
    assert main(args) == 1
    assert "nope.json" in capsys.readouterr().err


def test_train_zero_iterations_is_uniform_init(tmp_path):
    assert main(train_args(tmp_path / "m.json", "--iters", "0")) == 0
    table, _ = load_model(tmp_path / "m.json")
    pairs, _ = read_clicks(fixture_path("clicks.tsv"), fixture_path("docs"), load_registry(REGISTRY))
    assert table.p_t_given_q == initial_table(pairs).p_t_given_q


def test_commands_are_byte_identical(tmp_path, artifacts):
    assert main(extract_args(tmp_path / "index")) == 0
    assert main(train_args(tmp_path / "model.json")) == 0
    for name in (INDEX_FILE, NAMES_FILE):
        assert (tmp_path / "index" / name).read_bytes() == (artifacts / "index" / name).read_bytes()
    assert (tmp_path / "model.json").read_bytes() == (artifacts / "model.json").read_bytes()


def test_query_prints_regex_idiom_first(artifacts, tmp_path, capsys):
    out_json = tmp_path / "r.json"
    rc = main(query_args(artifacts, "--text", "match regular expression", "--top", "3",
                         "--json-out", str(out_json)))
    assert rc == 0
    out = capsys.readouterr().out
    first = out.splitlines()[0]
    assert first.startswith("#1  score=") and first.endswith(REGEX_KEY)
    assert "var match = regex.Match(input);" in out
    doc = json.loads(out_json.read_text())
    assert doc["query"] == "match regular expression"
    assert [r["rank"] for r in doc["results"]] == [1, 2, 3]
    assert doc["results"][0]["canonical"] == REGEX_KEY
    assert doc["results"][0]["snippet"] in out


def test_query_unknown_words(artifacts, capsys):
    assert main(query_args(artifacts, "--text", "zzz qqq")) == 0
    assert "no snippets" in capsys.readouterr().out


def test_query_registry_mismatch(artifacts, tmp_path, capsys):
    doc = json.loads(fixture_path("registry.json").read_text())
    doc["types"] = doc["types"][:1]
    small = tmp_path / "small.json"
    small.write_text(json.dumps(doc))
    args = query_args(artifacts, "--text", "x")
    args[args.index(REGISTRY)] = str(small)
    assert main(args) == 1
    assert "rebuild the index" in capsys.readouterr().err


def test_eval_report(artifacts, tmp_path, capsys):
    args = ["-q", "eval", "--model", str(artifacts / "model.json"), "--index", str(artifacts / "index"),
            "--registry", REGISTRY, "--cases", str(fixture_path("cases.json")), "--no-timing",
            "--report-dir", str(tmp_path / "rep")]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert out.startswith("# relevance = ")
    rows = [l.split() for l in out.splitlines()]
    match_row = next(r for r in rows if r[:3] == ["match", "regular", "expression"])
    assert match_row[3] == "1"
    assert rows[-1][0] == "Average"
    assert (tmp_path / "rep" / "eval.tsv").is_file() and (tmp_path / "rep" / "eval.png").is_file()
    # a second run reproduces the report exactly
    assert main(args) == 0
    assert capsys.readouterr().out == out


def test_eval_malformed_cases(artifacts, tmp_path, capsys):
    bad = tmp_path / "cases.json"
    bad.write_text("[1, 2")
    args = ["eval", "--model", str(artifacts / "model.json"), "--index", str(artifacts / "index"),
            "--registry", REGISTRY, "--cases", str(bad)]
    assert main(args) == 1
    assert "malformed case file" in capsys.readouterr().err


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert __version__ in capsys.readouterr().out
