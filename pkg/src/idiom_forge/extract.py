"""Corpus mining: per-variable structured call sequences, grouping, name statistics."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from . import scs as S
from .minilang import (Assign, Call, Comment, Eq, ExprStmt, FieldGet, If, New, ParseError, Return, Var,
                       VarDecl, While, iter_methods, parse_program, resolve_method)
from .minilang.resolve import TypedMethod, VarInfo
from .registry import CONSTRUCTOR, GET, ApiRef, Registry

log = logging.getLogger(__name__)

INDEX_FILE = "scs-index.jsonl"
NAMES_FILE = "names.jsonl"
FORMAT_VERSION = 1
MAX_SOURCES = 5


class IndexFormatError(ValueError):
    """Index artifact is truncated or otherwise unreadable."""


class VersionMismatchError(IndexFormatError):
    pass


# -- per-method extraction ----------------------------------------------------

def _bare(e, tm: TypedMethod) -> Optional[VarInfo]:
    return tm.binding(e) if isinstance(e, Var) else None


def _expr_events(e, v: VarInfo, tm: TypedMethod) -> list[S.Scs]:
    out: list[S.Scs] = []
    if isinstance(e, (Call, New)):
        if isinstance(e, Call) and e.receiver is not None:
            out += _expr_events(e.receiver, v, tm)
        for a in e.args:
            out += [S.UNKNOWN] if _bare(a, tm) is v else _expr_events(a, v, tm)
        if isinstance(e, Call) and e.receiver is not None and _bare(e.receiver, tm) is v:
            api = tm.member(e)
            out.append(S.Action(api) if api else S.UNKNOWN)
    elif isinstance(e, FieldGet):
        out += _expr_events(e.receiver, v, tm)
        if _bare(e.receiver, tm) is v:
            api = tm.member(e)
            out.append(S.Action(api) if api else S.UNKNOWN)
    elif isinstance(e, Eq):
        out += _expr_events(e.left, v, tm) + _expr_events(e.right, v, tm)
    return out


def _block_scs(stmts, v: VarInfo, tm: TypedMethod) -> S.Scs:
    return S.Seq(tuple(_stmt_scs(s, v, tm) for s in stmts))


def _stmt_scs(s, v: VarInfo, tm: TypedMethod) -> S.Scs:
    if isinstance(s, VarDecl):
        return S.Seq(tuple(_expr_events(s.init, v, tm)))
    if isinstance(s, Assign):
        if isinstance(s.target, FieldGet):
            ev = _expr_events(s.target.receiver, v, tm) + _expr_events(s.value, v, tm)
            if _bare(s.target.receiver, tm) is v:
                api = tm.member(s)
                ev.append(S.Action(api) if api else S.UNKNOWN)
            return S.Seq(tuple(ev))
        return S.Seq(tuple(_expr_events(s.value, v, tm)))
    if isinstance(s, ExprStmt):
        return S.Seq(tuple(_expr_events(s.expr, v, tm)))
    if isinstance(s, Return):
        if s.value is None:
            return S.EMPTY
        if _bare(s.value, tm) is v:
            return S.UNKNOWN
        return S.Seq(tuple(_expr_events(s.value, v, tm)))
    if isinstance(s, If):
        return S.If(S.Seq(tuple(_expr_events(s.cond, v, tm))),
                    _block_scs(s.then, v, tm), _block_scs(s.else_, v, tm))
    if isinstance(s, While):
        return S.While(S.Seq(tuple(_expr_events(s.cond, v, tm))), _block_scs(s.body, v, tm))
    if isinstance(s, Comment):
        return S.EMPTY
    raise TypeError(f"not a statement: {s!r}")


def _walk_stmts(stmts):
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from _walk_stmts(s.then)
            yield from _walk_stmts(s.else_)
        elif isinstance(s, While):
            yield from _walk_stmts(s.body)


def _decl_sites(stmts):
    """(block, index, VarDecl) for every declaration, outermost first."""
    for i, s in enumerate(stmts):
        if isinstance(s, VarDecl):
            yield stmts, i, s
        elif isinstance(s, If):
            yield from _decl_sites(s.then)
            yield from _decl_sites(s.else_)
        elif isinstance(s, While):
            yield from _decl_sites(s.body)


def _aliased(tm: TypedMethod) -> set[int]:
    """Keys of variables copied to or from another variable."""
    out: set[int] = set()
    for s in _walk_stmts(tm.method.body):
        if isinstance(s, VarDecl):
            src = _bare(s.init, tm)
            if src is not None:
                out.add(src.key)
                out.add(tm.decls[id(s)].key)
        elif isinstance(s, Assign) and isinstance(s.target, Var):
            src = _bare(s.value, tm)
            dst = tm.binding(s.target)
            if src is not None:
                out.add(src.key)
                if dst is not None:
                    out.add(dst.key)
    return out


def _assigns_to(s, v: VarInfo, tm: TypedMethod) -> bool:
    return isinstance(s, Assign) and isinstance(s.target, Var) and tm.binding(s.target) is v


def _creating_api(e, tm: TypedMethod) -> Optional[ApiRef]:
    if isinstance(e, (Call, New, FieldGet)):
        return tm.member(e)
    return None


def extract_method(tm: TypedMethod, reg: Registry) -> list[tuple[str, S.Scs]]:
    """SCSs of every extractable local variable of one type-resolved method."""
    aliased = _aliased(tm)
    out: list[tuple[str, S.Scs]] = []
    for block, idx, decl in _decl_sites(tm.method.body):
        v = tm.decls[id(decl)]
        if v.type is None or not reg.is_declared(v.type) or v.key in aliased:
            continue
        later = block[idx + 1:]
        splits = [idx + 1 + j for j, s in enumerate(later) if _assigns_to(s, v, tm)]
        nested = any(_assigns_to(s, v, tm) for top in later if not _assigns_to(top, v, tm)
                     for s in _walk_stmts([top]))
        if nested:
            # lifetime boundaries inside control flow are not tracked
            continue
        bounds = [idx] + splits + [len(block)]
        for a, b in zip(bounds, bounds[1:]):
            start = block[a]
            init = start.init if isinstance(start, VarDecl) else start.value
            api = _creating_api(init, tm)
            tail = [_stmt_scs(s, v, tm) for s in block[a + 1:b]]
            if b < len(block):
                # the right-hand side of the next assignment still sees this lifetime
                tail += _expr_events(block[b].value, v, tm)
            if api is None or api.return_type != v.type:
                continue
            out.append((v.name, S.simplify(S.Seq((S.Creation(api), *tail)))))
    return out


def mine_names(tm: TypedMethod) -> tuple[Counter, Counter]:
    """(creator, field) name counters for one method."""
    creators: Counter = Counter()
    fields: Counter = Counter()
    for s in _walk_stmts(tm.method.body):
        if isinstance(s, VarDecl):
            api = _creating_api(s.init, tm)
            if api is None:
                continue
            (fields if api.kind == GET else creators)[(api, s.name)] += 1
    return creators, fields


# -- index ----------------------------------------------------------------------

@dataclass
class ScsGroup:
    key: str
    scs: S.Scs
    count: int
    root_type: str
    vector: S.SparseVector
    sources: list[tuple[str, str]] = field(default_factory=list)


def root_type_of(s: S.Scs) -> str:
    head = S.creation_of(s)
    if head is None:
        raise ValueError("SCS is not rooted")
    api = head.api
    return api.declaring_type if api.kind == CONSTRUCTOR else api.return_type


@dataclass
class ScsIndex:
    dims: int
    groups: dict[str, ScsGroup] = field(default_factory=dict)
    tracers: dict[ApiRef, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tracers:
            self.rebuild_tracers()

    def rebuild_tracers(self) -> None:
        tracers: dict[ApiRef, set[str]] = {}
        for key, g in self.groups.items():
            for api in S.apis(g.scs):
                tracers.setdefault(api, set()).add(key)
        self.tracers = {api: sorted(keys) for api, keys in sorted(tracers.items())}

    def __len__(self) -> int:
        return len(self.groups)

    @classmethod
    def from_counts(cls, reg: Registry, counts: dict[str, tuple[S.Scs, int]],
                    sources: Optional[dict[str, list[tuple[str, str]]]] = None) -> "ScsIndex":
        groups = {}
        for key in sorted(counts):
            tree, n = counts[key]
            groups[key] = ScsGroup(key, tree, n, root_type_of(tree), S.to_vector(tree, reg),
                                   sorted((sources or {}).get(key, []))[:MAX_SOURCES])
        return cls(len(reg), groups)


@dataclass
class NameModel:
    by_creator: dict[ApiRef, list[tuple[str, int]]] = field(default_factory=dict)
    by_field: dict[ApiRef, list[tuple[str, int]]] = field(default_factory=dict)

    @staticmethod
    def _table(counter: Counter) -> dict[ApiRef, list[tuple[str, int]]]:
        table: dict[ApiRef, list[tuple[str, int]]] = {}
        for (api, name), n in counter.items():
            table.setdefault(api, []).append((name, n))
        return {api: sorted(rows, key=lambda r: (-r[1], r[0])) for api, rows in sorted(table.items())}

    @classmethod
    def from_counters(cls, creators: Counter, fields: Counter) -> "NameModel":
        return cls(cls._table(creators), cls._table(fields))

    def candidates(self, api: ApiRef) -> list[str]:
        table = self.by_field if api.kind == GET else self.by_creator
        return [name for name, _ in table.get(api, ())]


@dataclass
class CorpusReport:
    files: int = 0
    methods: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class FileResult:
    groups: Counter = field(default_factory=Counter)
    trees: dict[str, S.Scs] = field(default_factory=dict)
    sources: dict[str, list[tuple[str, str]]] = field(default_factory=dict)
    creators: Counter = field(default_factory=Counter)
    fields: Counter = field(default_factory=Counter)
    methods: int = 0
    error: Optional[str] = None

    def merge(self, other: "FileResult") -> "FileResult":
        out = FileResult(self.groups + other.groups, {**self.trees, **other.trees},
                         creators=self.creators + other.creators, fields=self.fields + other.fields,
                         methods=self.methods + other.methods)
        for src in (self.sources, other.sources):
            for k, v in src.items():
                out.sources.setdefault(k, []).extend(v)
        return out


def extract_file(name: str, text: str, reg: Registry) -> FileResult:
    """Pure per-file extraction; parse failures are reported in ``error``."""
    res = FileResult()
    try:
        prog = parse_program(text)
    except ParseError as e:
        res.error = str(e)
        return res
    for cls, m in iter_methods(prog):
        tm = resolve_method(m, reg)
        res.methods += 1
        for _var, tree in extract_method(tm, reg):
            key = S.canonical_form(tree)
            res.groups[key] += 1
            res.trees[key] = tree
            res.sources.setdefault(key, []).append((name, f"{cls.name}.{m.name}"))
        c, f = mine_names(tm)
        res.creators += c
        res.fields += f
    return res


CorpusItem = Union[str, Path, tuple[str, str]]


def read_corpus(directory: Union[str, Path]) -> list[Path]:
    return sorted(Path(directory).rglob("*.mini"))


def build_index(corpus: Iterable[CorpusItem], reg: Registry,
                report: Optional[CorpusReport] = None) -> tuple[ScsIndex, NameModel]:
    """Extract, group by canonical form, and mine variable names over a corpus.

    ``corpus`` items are file paths or ``(name, text)`` pairs.
    """
    report = report if report is not None else CorpusReport()
    total = FileResult()
    for item in corpus:
        if isinstance(item, tuple):
            name, text = item
        else:
            name, text = str(item), Path(item).read_text(encoding="utf-8")
        res = extract_file(name, text, reg)
        report.files += 1
        if res.error is not None:
            log.warning("skipping %s: %s", name, res.error)
            report.failures.append((name, res.error))
            continue
        total = total.merge(res)
    report.methods = total.methods
    counts = {k: (total.trees[k], n) for k, n in total.groups.items()}
    index = ScsIndex.from_counts(reg, counts, total.sources)
    return index, NameModel.from_counters(total.creators, total.fields)


# -- persistence ------------------------------------------------------------------

def _write_jsonl(path: Path, header: dict, records: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for rec in [header, *records]:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")


def _read_jsonl(path: Path, fmt: str) -> tuple[dict, list[dict]]:
    if not path.exists():
        raise FileNotFoundError(f"{path} not found (run 'idiom-forge extract' first)")
    text = path.read_text(encoding="utf-8")
    if text and not text.endswith("\n"):
        raise IndexFormatError(f"{path}: truncated record at end of file")
    try:
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as e:
        raise IndexFormatError(f"{path}: corrupt record: {e.msg}") from None
    if not rows or rows[0].get("format") != fmt:
        raise IndexFormatError(f"{path}: missing or foreign header")
    header = rows[0]
    if header.get("version") != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: version {header.get('version')} != {FORMAT_VERSION}")
    if header.get("records") != len(rows) - 1:
        raise IndexFormatError(f"{path}: expected {header.get('records')} records, found {len(rows) - 1}")
    return header, rows[1:]


def save_index(index: ScsIndex, names: NameModel, directory: Union[str, Path]) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    groups = [{
        "key": g.key,
        "scs": S.to_json(g.scs),
        "count": g.count,
        "root_type": g.root_type,
        "vector": [[i, w] for i, w in sorted(g.vector.entries.items())],
        "sources": [list(s) for s in g.sources],
    } for g in index.groups.values()]
    _write_jsonl(d / INDEX_FILE, {"format": "idiom-forge/scs-index", "version": FORMAT_VERSION,
                                  "dims": index.dims, "records": len(groups)}, groups)
    rows = []
    for table, data in (("creator", names.by_creator), ("field", names.by_field)):
        for api, pairs in data.items():
            rows.append({"table": table, "api": api.to_json(), "names": [list(p) for p in pairs]})
    _write_jsonl(d / NAMES_FILE, {"format": "idiom-forge/names", "version": FORMAT_VERSION,
                                  "records": len(rows)}, rows)


def load_index(directory: Union[str, Path]) -> tuple[ScsIndex, NameModel]:
    d = Path(directory)
    header, rows = _read_jsonl(d / INDEX_FILE, "idiom-forge/scs-index")
    try:
        dims = int(header["dims"])
        groups = {}
        for r in rows:
            groups[r["key"]] = ScsGroup(
                r["key"], S.from_json(r["scs"]), int(r["count"]), r["root_type"],
                S.SparseVector(dims, {int(i): float(w) for i, w in r["vector"]}),
                [tuple(s) for s in r["sources"]])
        index = ScsIndex(dims, groups)
        _, name_rows = _read_jsonl(d / NAMES_FILE, "idiom-forge/names")
        names = NameModel()
        for r in name_rows:
            table = names.by_creator if r["table"] == "creator" else names.by_field
            table[ApiRef.from_json(r["api"])] = [(n, int(c)) for n, c in r["names"]]
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, IndexFormatError):
            raise
        raise IndexFormatError(f"{d}: malformed record: {e}") from None
    return index, names
