import struct

import pytest

from idiom_forge import fixture_path, scs as S
from idiom_forge.evaluate import (COLUMNS, CaseFileError, EvalCase, PROXY_NOTE, format_table, format_tsv, frank,
                                  grade, load_cases, metrics_for, run_eval, summarize, top_percent, write_report)

from conftest import api
from oracles import MOCK_AVERAGE, MOCK_EXPECTED, MOCK_GRADING, mock_snippets


def regex_case(reg):
    return EvalCase("q", frozenset({api(reg, "Regex.Match(string)")}))


def test_top1_relevant_is_frank_1():
    assert frank([True, False, False]) == 1
    assert frank([False, False, True]) == 3


def test_no_relevant_in_top10_is_undefined():
    assert frank([False] * 10 + [True]) is None
    assert frank([]) is None


def test_four_of_five_is_80_percent():
    graded = [True, True, False, True, True]
    assert top_percent(graded, 5) == 80.0
    # fewer than n results still divides by n
    assert top_percent(graded, 10) == 40.0


def test_grade_uses_api_intersection(reg):
    case = regex_case(reg)
    assert grade([s.root_scs for s in mock_snippets(reg, [True, False])], case) == [True, False]
    assert grade([S.EMPTY], case) == [False]


def test_mocked_grading_hand_arithmetic(reg):
    cases = [EvalCase(q, regex_case(reg).relevant_apis) for q in MOCK_GRADING]
    ticks = iter(range(100))
    rows = run_eval(cases, lambda q: mock_snippets(reg, MOCK_GRADING[q]), clock=lambda: float(next(ticks)))
    for r in rows:
        assert (r.frank, r.top5, r.top10) == MOCK_EXPECTED[r.query]
        assert (r.snippets, r.names, r.mined, r.fallback) == (10, 20, 10, 10)
        assert r.seconds == 1.0 and r.sec_per_snippet == 0.1
    s = summarize(rows)
    assert (s.frank, s.top5, s.top10) == MOCK_AVERAGE
    assert s.names == 20.0


def test_summary_without_any_hit():
    s = summarize([metrics_for("a", [False] * 10), metrics_for("b", [])])
    assert s.frank is None and s.top5 == 0.0
    assert s.sec_per_snippet is None


def test_only_first_ten_snippets_count(reg):
    case = EvalCase("q", regex_case(reg).relevant_apis)
    rows = run_eval([case], lambda q: mock_snippets(reg, [False] * 10 + [True] * 5))
    assert rows[0].frank is None and rows[0].snippets == 15 and rows[0].names == 20


def test_load_fixture_cases(reg):
    cases = load_cases(fixture_path("cases.json"), reg)
    assert len(cases) == 10
    first = cases[0]
    assert first.query == "match regular expression"
    # Type.Member expands to overloads and accessors
    assert api(reg, "Regex.Match(string)") in first.relevant_apis
    assert api(reg, "get(Match.Success)") in first.relevant_apis


@pytest.mark.parametrize("text, fragment", [
    ("{not json", "malformed"),
    ('{"queries": []}', "malformed"),
    ('{"cases": [{"query": "x"}]}', "needs 'query' and 'relevant'"),
    ('{"cases": [{"query": "x", "relevant": ["Nope.Nothing"]}]}', "unknown API"),
])
def test_malformed_case_file(tmp_path, reg, text, fragment):
    p = tmp_path / "cases.json"
    p.write_text(text)
    with pytest.raises(CaseFileError, match=fragment):
        load_cases(p, reg)


def mock_rows(reg):
    cases = [EvalCase(q, regex_case(reg).relevant_apis) for q in MOCK_GRADING]
    return run_eval(cases, lambda q: mock_snippets(reg, MOCK_GRADING[q]), clock=lambda: 0.0)


def test_table_format(reg):
    text = format_table(mock_rows(reg), timing=False)
    lines = text.splitlines()
    assert lines[0] == f"# {PROXY_NOTE}"
    assert lines[1].split() == COLUMNS
    assert lines[-1].split() == ["Average", "2.00", "40", "30", "20.0", "30", "30"]
    assert [l.split()[1] for l in lines[3:6]] == ["1", "3", "-"]


def test_tsv_report(reg):
    rows = list(csv_rows(format_tsv(mock_rows(reg))))
    assert rows[0] == COLUMNS
    assert rows[-1][:4] == ["Average", "2.00", "40", "30"]
    assert len(rows) == 5


def csv_rows(text):
    import csv
    return csv.reader((l for l in text.splitlines() if not l.startswith("#")), delimiter="\t")


def test_write_report_creates_tsv_and_png(tmp_path, reg):
    tsv, png = write_report(mock_rows(reg), tmp_path / "out", timing=False)
    assert tsv.read_text().startswith(f"# {PROXY_NOTE}\n")
    data = png.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    width, height = struct.unpack(">II", data[16:24])
    assert width > 0 and height > 0


def test_report_is_byte_identical(tmp_path, reg):
    a = write_report(mock_rows(reg), tmp_path / "a", timing=False)
    b = write_report(mock_rows(reg), tmp_path / "b", timing=False)
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()
