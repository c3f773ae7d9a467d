"""Query-word to API translation model learned from clickthrough pairs.

Training is IBM Model 1 style EM with query words as sources and API names as
targets.  At query time the per-word translations are mixed by unigram weights
of the query words.
"""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .minilang import ParseError, parse_program, parse_statements, resolve_method
from .minilang.syntax import MethodBody
from .registry import GET, ApiRef, Registry

log = logging.getLogger(__name__)

DEFAULT_FILTER = frozenset({"minilang"})
MODEL_FORMAT = "idiom-forge/model"
MODEL_VERSION = 1


class EmptyQueryError(ValueError):
    pass


@dataclass(frozen=True)
class ClickPair:
    query_tokens: tuple[str, ...]
    api_list: tuple[ApiRef, ...]


@dataclass
class TranslationTable:
    """P(api | token); rows are keyed by token."""

    p_t_given_q: dict[str, dict[ApiRef, float]] = field(default_factory=dict)

    @property
    def tokens(self) -> list[str]:
        return sorted(self.p_t_given_q)

    @property
    def apis(self) -> list[ApiRef]:
        return sorted({t for row in self.p_t_given_q.values() for t in row})

    def prob(self, api: ApiRef, token: str) -> float:
        return self.p_t_given_q.get(token, {}).get(api, 0.0)


@dataclass
class UnigramStats:
    term_counts: dict[str, int] = field(default_factory=dict)
    total_terms: int = 0

    @classmethod
    def from_queries(cls, queries: Iterable[Sequence[str]]) -> "UnigramStats":
        counts = Counter(tok for q in queries for tok in q)
        return cls(dict(sorted(counts.items())), sum(counts.values()))

    def alpha(self, token: str) -> float:
        if not self.total_terms:
            return 0.0
        return self.term_counts.get(token, 0) / self.total_terms


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize_query(text: str, stop: Iterable[str] = DEFAULT_FILTER) -> list[str]:
    stop = frozenset(stop)
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stop]


# -- documents ---------------------------------------------------------------

_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)
_MENTION_RE = re.compile(r"\b([A-Za-z_]\w*)\.([A-Za-z_]\w*)\b")


def _parse_fragment(code: str):
    try:
        prog = parse_program(code)
        if prog.classes:
            return [m for cls in prog.classes for m in cls.methods]
    except ParseError:
        pass
    try:
        return [MethodBody("void", "fragment", (), parse_statements(code))]
    except ParseError:
        return None


def _fragment_apis(code: str, reg: Registry) -> Optional[list[ApiRef]]:
    methods = _parse_fragment(code)
    if methods is None:
        return None
    out: list[ApiRef] = []
    for m in methods:
        out += [api for _, api in resolve_method(m, reg).member_sites() if api is not None]
    return out


def _mentions(prose: str, reg: Registry) -> list[ApiRef]:
    out = []
    for m in _MENTION_RE.finditer(prose):
        cands = reg.members_named(m.group(1), m.group(2))
        gets = [c for c in cands if c.kind == GET]
        if gets:
            out.append(gets[0])
        elif len(cands) == 1:
            out.append(cands[0])
    return out


def extract_api_lists(doc: str, reg: Registry) -> list[list[ApiRef]]:
    """One API list per code fragment, plus one for prose mentions."""
    lists: list[list[ApiRef]] = []
    prose_parts = []
    last = 0
    for m in _FENCE_RE.finditer(doc):
        prose_parts.append(doc[last:m.start()])
        last = m.end()
        apis = _fragment_apis(m.group(1), reg)
        if apis:
            lists.append(apis)
    prose_parts.append(doc[last:])
    mentioned = _mentions("\n".join(prose_parts), reg)
    if mentioned:
        lists.append(mentioned)
    return lists


def extract_apis_from_document(doc: str, reg: Registry) -> list[ApiRef]:
    """All API names a document yields, in appearance order."""
    out: list[ApiRef] = []
    prose_last = 0
    for m in _FENCE_RE.finditer(doc):
        out += _mentions(doc[prose_last:m.start()], reg)
        out += _fragment_apis(m.group(1), reg) or []
        prose_last = m.end()
    out += _mentions(doc[prose_last:], reg)
    return out


def read_clicks(clicks: Union[str, Path], docs: Union[str, Path], reg: Registry,
                stop: Iterable[str] = DEFAULT_FILTER) -> tuple[list[ClickPair], list[list[str]]]:
    """Read ``query<TAB>doc_id`` lines and the referenced ``doc_id.md`` files.

    Returns the training pairs and the tokenized query of every click line.
    """
    docs = Path(docs)
    cache: dict[str, list[list[ApiRef]]] = {}
    pairs: list[ClickPair] = []
    queries: list[list[str]] = []
    for lineno, line in enumerate(Path(clicks).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        if "\t" not in line:
            raise ValueError(f"{clicks}:{lineno}: expected 'query<TAB>doc_id'")
        query, doc_id = line.rsplit("\t", 1)
        tokens = tokenize_query(query, stop)
        queries.append(tokens)
        doc_id = doc_id.strip()
        if doc_id not in cache:
            path = docs / f"{doc_id}.md"
            if not path.exists():
                log.warning("%s:%d: missing document %s", clicks, lineno, path)
                cache[doc_id] = []
            else:
                cache[doc_id] = extract_api_lists(path.read_text(encoding="utf-8"), reg)
        if not tokens:
            continue
        for apis in cache[doc_id]:
            pairs.append(ClickPair(tuple(tokens), tuple(apis)))
    return pairs, queries


# -- EM ----------------------------------------------------------------------------

def initial_table(pairs: Sequence[ClickPair]) -> TranslationTable:
    cooc: dict[str, set[ApiRef]] = defaultdict(set)
    for p in pairs:
        for q in p.query_tokens:
            cooc[q].update(p.api_list)
    return TranslationTable({q: {t: 1.0 / len(ts) for t in sorted(ts)} for q, ts in sorted(cooc.items())})


def log_likelihood(pairs: Sequence[ClickPair], table: TranslationTable) -> float:
    """Model 1 log-likelihood of the API lists given their queries."""
    total = 0.0
    for p in pairs:
        n = len(p.query_tokens)
        for t in p.api_list:
            total += math.log(sum(table.prob(t, q) for q in p.query_tokens) / n)
    return total


def em_step(pairs: Sequence[ClickPair], table: TranslationTable, add_k: float = 0.0) -> TranslationTable:
    counts: dict[str, dict[ApiRef, float]] = {q: dict.fromkeys(row, 0.0) for q, row in table.p_t_given_q.items()}
    for p in pairs:
        rows = [table.p_t_given_q[q] for q in p.query_tokens]
        for t in p.api_list:
            weights = [row[t] for row in rows]
            z = sum(weights)
            if z == 0.0:
                continue
            for q, w in zip(p.query_tokens, weights):
                counts[q][t] += w / z
    out = {}
    for q, row in counts.items():
        z = sum(row.values()) + add_k * len(row)
        out[q] = {t: (c + add_k) / z for t, c in row.items()} if z > 0 else dict(table.p_t_given_q[q])
    return TranslationTable(out)


def _max_change(a: TranslationTable, b: TranslationTable) -> float:
    return max((abs(a.p_t_given_q[q][t] - p) for q, row in b.p_t_given_q.items() for t, p in row.items()),
               default=0.0)


def train_em(pairs: Sequence[ClickPair], iterations: int, add_k: float = 0.0, tol: float = 1e-6,
             history: Optional[list[float]] = None) -> TranslationTable:
    """Estimate P(api | token) by EM, starting from uniform translations.

    Stops after ``iterations`` rounds or once no entry moves by ``tol`` or more.
    If ``history`` is given, the log-likelihood before each round and after the
    last one is appended to it.
    """
    pairs = [p for p in pairs if p.query_tokens and p.api_list]
    if not pairs:
        raise ValueError("no training pairs")
    table = initial_table(pairs)
    for _ in range(iterations):
        if history is not None:
            history.append(log_likelihood(pairs, table))
        nxt = em_step(pairs, table, add_k)
        done = _max_change(table, nxt) < tol
        table = nxt
        if done:
            break
    if history is not None:
        history.append(log_likelihood(pairs, table))
    return table


# -- query posterior -------------------------------------------------------------------

def unigram_prob(q: str, query: Sequence[str], stats: UnigramStats) -> float:
    """Weight of token ``q`` within ``query``; unseen tokens weigh nothing."""
    if not query:
        raise EmptyQueryError("empty query")
    z = sum(stats.alpha(t) for t in query)
    if z == 0.0:
        return 1.0 / len(query) if q in query else 0.0
    return stats.alpha(q) / z


def api_posterior(query: Sequence[str], table: TranslationTable, stats: UnigramStats,
                  reg: Optional[Registry] = None) -> list[tuple[ApiRef, float]]:
    """P(api | query) for every API with mass, most probable first.

    Ties are broken by vocabulary position when ``reg`` is given, else by the
    ApiRef ordering.
    """
    if not query:
        raise EmptyQueryError("empty query")
    mass: dict[ApiRef, float] = defaultdict(float)
    for q in query:
        w = unigram_prob(q, query, stats)
        if w == 0.0:
            continue
        for t, p in table.p_t_given_q.get(q, {}).items():
            mass[t] += p * w
    rank = (lambda a: reg.index_of(a)) if reg is not None else (lambda a: a)
    return sorted(((t, p) for t, p in mass.items() if p > 0.0), key=lambda tp: (-tp[1], rank(tp[0])))


# -- persistence ---------------------------------------------------------------------

def save_model(path: Union[str, Path], table: TranslationTable, stats: UnigramStats,
               meta: Optional[dict] = None) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "meta": meta or {},
        "unigrams": {"term_counts": stats.term_counts, "total_terms": stats.total_terms},
        "translations": [
            {"token": q, "api": t.to_json(), "p": p}
            for q in sorted(table.p_t_given_q) for t, p in sorted(table.p_t_given_q[q].items())
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: Union[str, Path]) -> tuple[TranslationTable, UnigramStats]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"model {path} not found (run 'idiom-forge train' first)")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: corrupt model file: {e.msg}") from None
    if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: not a version-{MODEL_VERSION} model file")
    rows: dict[str, dict[ApiRef, float]] = {}
    for r in doc["translations"]:
        rows.setdefault(r["token"], {})[ApiRef.from_json(r["api"])] = float(r["p"])
    u = doc["unigrams"]
    return TranslationTable(rows), UnigramStats(dict(u["term_counts"]), int(u["total_terms"]))
