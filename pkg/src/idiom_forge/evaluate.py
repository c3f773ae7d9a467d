"""Benchmark harness: FRank, %Top5, %Top10, naming counts and timing per query.

Relevance is graded mechanically: a snippet counts as relevant when its root
SCS uses at least one API from the case's answer key.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from . import scs as S
from .registry import ApiRef, Registry

PROXY_NOTE = ("relevance = root SCS shares an API with the case's answer key "
              "(mechanical proxy for human grading)")
COLUMNS = ["query", "frank", "top5", "top10", "names", "mined", "fallback", "seconds", "sec_per_snippet"]


class CaseFileError(ValueError):
    pass


@dataclass(frozen=True)
class EvalCase:
    query: str
    relevant_apis: frozenset[ApiRef]


@dataclass
class QueryMetrics:
    query: str
    frank: Optional[int]
    top5: float
    top10: float
    snippets: int = 0
    names: int = 0
    mined: int = 0
    fallback: int = 0
    seconds: float = 0.0

    @property
    def sec_per_snippet(self) -> Optional[float]:
        return self.seconds / self.snippets if self.snippets else None


def _lookup(reg: Registry, name: str) -> list[ApiRef]:
    exact = reg.by_display(name)
    if exact is not None:
        return [exact]
    if "." in name and "(" not in name:
        type_name, member = name.split(".", 1)
        return reg.members_named(type_name, member)
    return []


def load_cases(path: Union[str, Path], reg: Registry) -> list[EvalCase]:
    """Read ``{"cases": [{"query": ..., "relevant": [api, ...]}]}``.

    API names are display forms (``Regex.Match(string)``, ``get(Match.Success)``)
    or ``Type.Member``, which stands for every overload and accessor.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        raw = doc["cases"]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise CaseFileError(f"{path}: malformed case file: {e}") from None
    cases = []
    for i, c in enumerate(raw):
        if not isinstance(c, dict) or "query" not in c or "relevant" not in c:
            raise CaseFileError(f"{path}: case {i} needs 'query' and 'relevant'")
        apis: set[ApiRef] = set()
        for name in c["relevant"]:
            found = _lookup(reg, name)
            if not found:
                raise CaseFileError(f"{path}: case {i}: unknown API {name!r}")
            apis.update(found)
        cases.append(EvalCase(c["query"], frozenset(apis)))
    return cases


def grade(root_scss: Sequence[S.Scs], case: EvalCase) -> list[bool]:
    return [bool(set(S.apis(s)) & case.relevant_apis) for s in root_scss]


def frank(graded: Sequence[bool], cutoff: int = 10) -> Optional[int]:
    for i, ok in enumerate(graded[:cutoff], 1):
        if ok:
            return i
    return None


def top_percent(graded: Sequence[bool], n: int) -> float:
    return 100.0 * sum(graded[:n]) / n


def metrics_for(query: str, graded: Sequence[bool], **extra) -> QueryMetrics:
    return QueryMetrics(query, frank(graded), top_percent(graded, 5), top_percent(graded, 10), **extra)


def run_eval(cases: Sequence[EvalCase], answer: Callable[[str], list],
             clock: Callable[[], float] = time.perf_counter) -> list[QueryMetrics]:
    """Run ``answer`` on each case query and score the snippets it returns."""
    rows = []
    for case in cases:
        start = clock()
        snippets = answer(case.query)
        elapsed = clock() - start
        top = snippets[:10]
        sources = [src for sn in top for src in sn.name_sources]
        rows.append(metrics_for(
            case.query, grade([sn.root_scs for sn in top], case),
            snippets=len(snippets), names=len(sources), mined=sources.count("mined"),
            fallback=sources.count("fallback"), seconds=elapsed))
    return rows


@dataclass
class Summary:
    frank: Optional[float]
    top5: float
    top10: float
    names: float
    seconds: float
    sec_per_snippet: Optional[float]


def summarize(rows: Sequence[QueryMetrics]) -> Summary:
    if not rows:
        return Summary(None, 0.0, 0.0, 0.0, 0.0, None)
    franks = [r.frank for r in rows if r.frank is not None]
    n = len(rows)
    total_snippets = sum(r.snippets for r in rows)
    total_seconds = sum(r.seconds for r in rows)
    return Summary(
        sum(franks) / len(franks) if franks else None,
        sum(r.top5 for r in rows) / n,
        sum(r.top10 for r in rows) / n,
        sum(r.names for r in rows) / n,
        total_seconds / n,
        total_seconds / total_snippets if total_snippets else None,
    )


def _fmt(x, digits: int = 1) -> str:
    if x is None:
        return "-"
    if isinstance(x, int):
        return str(x)
    return f"{x:.{digits}f}"


def report_rows(rows: Sequence[QueryMetrics], timing: bool = True) -> list[list[str]]:
    out = []
    for r in rows:
        out.append([r.query, _fmt(r.frank), _fmt(r.top5, 0), _fmt(r.top10, 0), str(r.names),
                    str(r.mined), str(r.fallback),
                    _fmt(r.seconds, 4) if timing else "", _fmt(r.sec_per_snippet, 4) if timing else ""])
    s = summarize(rows)
    out.append(["Average", _fmt(s.frank, 2), _fmt(s.top5, 0), _fmt(s.top10, 0), _fmt(s.names, 1),
                str(sum(r.mined for r in rows)), str(sum(r.fallback for r in rows)),
                _fmt(s.seconds, 4) if timing else "", _fmt(s.sec_per_snippet, 4) if timing else ""])
    return out


def format_table(rows: Sequence[QueryMetrics], timing: bool = True) -> str:
    body = report_rows(rows, timing)
    widths = [max(len(r[i]) for r in [COLUMNS, *body]) for i in range(len(COLUMNS))]

    def line(cells):
        return "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))

    sep = "-" * len(line(COLUMNS))
    lines = [f"# {PROXY_NOTE}", line(COLUMNS), sep]
    lines += [line(r) for r in body[:-1]]
    lines += [sep, line(body[-1])]
    return "\n".join(l.rstrip() for l in lines) + "\n"


def format_tsv(rows: Sequence[QueryMetrics], timing: bool = True) -> str:
    buf = io.StringIO()
    buf.write(f"# {PROXY_NOTE}\n")
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(COLUMNS)
    w.writerows(report_rows(rows, timing))
    return buf.getvalue()


def write_report(rows: Sequence[QueryMetrics], directory: Union[str, Path], timing: bool = True) -> list[Path]:
    """Write ``eval.tsv`` and the ``eval.png`` figure into ``directory``."""
    from .plotting import plot_eval

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    tsv = d / "eval.tsv"
    tsv.write_text(format_tsv(rows, timing), encoding="utf-8")
    png = d / "eval.png"
    plot_eval(rows, png)
    return [tsv, png]
