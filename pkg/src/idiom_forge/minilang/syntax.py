"""MiniLang abstract syntax.

Nodes are frozen dataclasses so that structural equality is plain ``==``.
Source positions ride along but are excluded from comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Pos = tuple[int, int]
_pos = field(default=(0, 0), compare=False, repr=False)


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    kind: str  # "int" | "bool" | "string" | "null"
    text: str  # source spelling, strings keep their quotes
    pos: Pos = _pos


@dataclass(frozen=True)
class Var:
    # also used for a type name in receiver position; the resolver decides
    name: str
    pos: Pos = _pos


@dataclass(frozen=True)
class FieldGet:
    receiver: "Expr"
    name: str
    pos: Pos = _pos


@dataclass(frozen=True)
class Call:
    receiver: Optional["Expr"]
    name: str
    args: tuple["Expr", ...] = ()
    pos: Pos = _pos


@dataclass(frozen=True)
class New:
    type_name: str
    args: tuple["Expr", ...] = ()
    pos: Pos = _pos


@dataclass(frozen=True)
class Default:
    type_name: str
    pos: Pos = _pos


@dataclass(frozen=True)
class Eq:
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos


Expr = Union[Literal, Var, FieldGet, Call, New, Default, Eq]


# -- statements -------------------------------------------------------------

@dataclass(frozen=True)
class VarDecl:
    name: str
    init: Expr
    pos: Pos = _pos


@dataclass(frozen=True)
class Assign:
    target: Union[Var, FieldGet]
    value: Expr
    pos: Pos = _pos


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    pos: Pos = _pos


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple["Stmt", ...] = ()
    else_: tuple["Stmt", ...] = ()
    pos: Pos = _pos


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple["Stmt", ...] = ()
    pos: Pos = _pos


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    pos: Pos = _pos


@dataclass(frozen=True)
class Comment:
    """Rendered as ``// text``; the parser discards comments."""
    text: str
    pos: Pos = _pos


Stmt = Union[VarDecl, Assign, ExprStmt, If, While, Return, Comment]


# -- declarations -----------------------------------------------------------

@dataclass(frozen=True)
class Param:
    type_name: str
    name: str
    pos: Pos = _pos


@dataclass(frozen=True)
class MethodBody:
    return_type: str
    name: str
    params: tuple[Param, ...]
    body: tuple[Stmt, ...]
    pos: Pos = _pos


@dataclass(frozen=True)
class ClassDecl:
    name: str
    methods: tuple[MethodBody, ...]
    pos: Pos = _pos


@dataclass(frozen=True)
class Program:
    classes: tuple[ClassDecl, ...] = ()


def iter_methods(prog: Program):
    for cls in prog.classes:
        for m in cls.methods:
            yield cls, m
