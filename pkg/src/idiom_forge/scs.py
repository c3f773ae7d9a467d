"""Structured call sequences: tree model, simplification, canonical text, vectors."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Union

from .registry import ApiRef, Registry


@dataclass(frozen=True)
class Creation:
    api: ApiRef


@dataclass(frozen=True)
class Action:
    api: ApiRef


@dataclass(frozen=True)
class Unknown:
    pass


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Seq:
    items: tuple["Scs", ...]


@dataclass(frozen=True)
class If:
    cond: "Scs"
    then: "Scs"
    else_: "Scs"


@dataclass(frozen=True)
class While:
    cond: "Scs"
    body: "Scs"


Scs = Union[Creation, Action, Unknown, Empty, Seq, If, While]
Atom = (Creation, Action, Unknown)
EMPTY = Empty()
UNKNOWN = Unknown()


def seq(*items: Scs) -> Scs:
    """Build a simplified sequence from ``items``."""
    return simplify(Seq(tuple(items)))


# -- traversal ---------------------------------------------------------------

def iter_nodes(s: Scs) -> Iterator[Scs]:
    yield s
    if isinstance(s, Seq):
        for item in s.items:
            yield from iter_nodes(item)
    elif isinstance(s, If):
        yield from iter_nodes(s.cond)
        yield from iter_nodes(s.then)
        yield from iter_nodes(s.else_)
    elif isinstance(s, While):
        yield from iter_nodes(s.cond)
        yield from iter_nodes(s.body)


def apis(s: Scs) -> list[ApiRef]:
    """Every ApiRef in ``s``, in program order, with repetition."""
    return [n.api for n in iter_nodes(s) if isinstance(n, (Creation, Action))]


def api_multiset(s: Scs) -> Counter:
    return Counter((type(n).__name__, n.api) for n in iter_nodes(s) if isinstance(n, (Creation, Action)))


def elements(s: Scs) -> tuple[Scs, ...]:
    if isinstance(s, Empty):
        return ()
    if isinstance(s, Seq):
        return s.items
    return (s,)


def creation_of(s: Scs):
    """The leading Creation of a rooted SCS, else ``None``."""
    items = elements(s)
    if items and isinstance(items[0], Creation):
        return items[0]
    return None


def is_rooted(s: Scs) -> bool:
    head = creation_of(s)
    if head is None:
        return False
    return sum(isinstance(n, Creation) for n in iter_nodes(s)) == 1


# -- simplification ----------------------------------------------------------

def _flatten(items) -> list[Scs]:
    out: list[Scs] = []
    for item in items:
        if isinstance(item, Seq):
            out.extend(_flatten(item.items))
        elif not isinstance(item, Empty):
            out.append(item)
    return out


def _mk_seq(items: list[Scs]) -> Scs:
    items = _flatten(items)
    if not items:
        return EMPTY
    if len(items) == 1:
        return items[0]
    return Seq(tuple(items))


def _split_condition(cond: Scs) -> tuple[list[Scs], Scs]:
    """Hoist all but the last atom out of a condition."""
    items = _flatten([cond])
    if not items:
        return [], EMPTY
    if isinstance(items[-1], Atom):
        return items[:-1], items[-1]
    return items, EMPTY


def _step(s: Scs) -> Scs:
    if isinstance(s, Seq):
        return _mk_seq([_step(i) for i in s.items])
    if isinstance(s, If):
        pre, cond = _split_condition(_step(s.cond))
        then, else_ = _step(s.then), _step(s.else_)
        empty_then, empty_else = isinstance(then, Empty), isinstance(else_, Empty)
        if isinstance(cond, Empty) and empty_else:
            node = then
        elif isinstance(cond, Empty) and empty_then:
            node = else_
        elif empty_then and empty_else:
            node = cond
        else:
            node = If(cond, then, else_)
        return _mk_seq(pre + [node])
    if isinstance(s, While):
        pre, cond = _split_condition(_step(s.cond))
        body = _step(s.body)
        if isinstance(cond, Empty):
            node = body
        elif isinstance(body, Empty):
            node = cond
        else:
            node = While(cond, body)
        return _mk_seq(pre + [node])
    return s


def simplify(s: Scs) -> Scs:
    """Rewrite ``s`` to simplified form; iterates the rules to a fixpoint."""
    while True:
        nxt = _step(s)
        if nxt == s:
            return s
        s = nxt


def strip_unknowns(s: Scs) -> Scs:
    def go(n: Scs) -> Scs:
        if isinstance(n, Unknown):
            return EMPTY
        if isinstance(n, Seq):
            return Seq(tuple(go(i) for i in n.items))
        if isinstance(n, If):
            return If(go(n.cond), go(n.then), go(n.else_))
        if isinstance(n, While):
            return While(go(n.cond), go(n.body))
        return n
    return simplify(go(s))


# -- canonical text ------------------------------------------------------------

def _atom_text(n: Scs, head: bool) -> str:
    if isinstance(n, Unknown):
        return "?"
    text = str(n.api)
    # bare spelling means Creation in head position and Action elsewhere
    if isinstance(n, Creation) and not head:
        return f"create({text})"
    if isinstance(n, Action) and head:
        return f"act({text})"
    return text


def _canon(s: Scs, head: bool) -> str:
    if isinstance(s, Empty):
        return ""
    if isinstance(s, Atom):
        return _atom_text(s, head)
    if isinstance(s, Seq):
        return ";".join(_canon(item, head and i == 0) for i, item in enumerate(s.items))
    if isinstance(s, If):
        return (f"if({_canon(s.cond, False)}){{{_canon(s.then, False)}}}"
                f"else{{{_canon(s.else_, False)}}}")
    if isinstance(s, While):
        return f"while({_canon(s.cond, False)}){{{_canon(s.body, False)}}}"
    raise TypeError(f"not an SCS: {s!r}")


def canonical_form(s: Scs) -> str:
    """Unique serialization of a simplified SCS (the grouping key)."""
    return _canon(s, True)


# -- JSON --------------------------------------------------------------------

def to_json(s: Scs):
    if isinstance(s, Creation):
        return {"creation": s.api.to_json()}
    if isinstance(s, Action):
        return {"action": s.api.to_json()}
    if isinstance(s, Unknown):
        return {"unknown": True}
    if isinstance(s, Empty):
        return {"empty": True}
    if isinstance(s, Seq):
        return {"seq": [to_json(i) for i in s.items]}
    if isinstance(s, If):
        return {"if": [to_json(s.cond), to_json(s.then), to_json(s.else_)]}
    if isinstance(s, While):
        return {"while": [to_json(s.cond), to_json(s.body)]}
    raise TypeError(f"not an SCS: {s!r}")


def from_json(d) -> Scs:
    (key, val), = d.items()
    if key == "creation":
        return Creation(ApiRef.from_json(val))
    if key == "action":
        return Action(ApiRef.from_json(val))
    if key == "unknown":
        return UNKNOWN
    if key == "empty":
        return EMPTY
    if key == "seq":
        return Seq(tuple(from_json(i) for i in val))
    if key == "if":
        return If(*(from_json(i) for i in val))
    if key == "while":
        return While(*(from_json(i) for i in val))
    raise ValueError(f"unknown SCS node {key!r}")


# -- vectors -------------------------------------------------------------------

class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SparseVector:
    dims: int
    entries: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for i, w in self.entries.items():
            if not 0 <= i < self.dims:
                raise IndexError(f"index {i} outside [0, {self.dims})")
            if w == 0:
                raise ValueError("sparse vectors store no zero weights")

    def __eq__(self, other):
        return (isinstance(other, SparseVector) and self.dims == other.dims
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.dims, tuple(sorted(self.entries.items()))))

    @property
    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))

    def is_zero(self) -> bool:
        return not self.entries

    def scaled(self, c: float) -> "SparseVector":
        return SparseVector(self.dims, {i: w * c for i, w in self.entries.items()})


def to_vector(s: Scs, reg: Registry) -> SparseVector:
    """Binary vector over the registry vocabulary marking the APIs in ``s``."""
    return SparseVector(len(reg), {reg.index_of(api): 1.0 for api in apis(s)})
