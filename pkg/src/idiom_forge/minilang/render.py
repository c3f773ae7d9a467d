"""Deterministic pretty-printer; output re-parses to the same AST."""

from __future__ import annotations

from typing import Iterable

from .syntax import (Assign, Call, Comment, Default, Eq, Expr, ExprStmt, FieldGet, If, Literal, New,
                     Program, Return, Stmt, Var, VarDecl, While)

INDENT = "  "


def render_expr(e: Expr) -> str:
    if isinstance(e, Literal):
        return e.text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, FieldGet):
        return f"{render_expr(e.receiver)}.{e.name}"
    if isinstance(e, Call):
        args = ", ".join(render_expr(a) for a in e.args)
        if e.receiver is None:
            return f"{e.name}({args})"
        return f"{render_expr(e.receiver)}.{e.name}({args})"
    if isinstance(e, New):
        return f"new {e.type_name}({', '.join(render_expr(a) for a in e.args)})"
    if isinstance(e, Default):
        return f"default({e.type_name})"
    if isinstance(e, Eq):
        return f"{render_expr(e.left)} == {render_expr(e.right)}"
    raise TypeError(f"not an expression: {e!r}")


def _block(stmts: Iterable[Stmt], level: int, out: list[str]) -> None:
    pad = INDENT * level
    out.append(pad + "{")
    for s in stmts:
        _stmt(s, level + 1, out)
    out.append(pad + "}")


def _stmt(s: Stmt, level: int, out: list[str]) -> None:
    pad = INDENT * level
    if isinstance(s, VarDecl):
        out.append(f"{pad}var {s.name} = {render_expr(s.init)};")
    elif isinstance(s, Assign):
        out.append(f"{pad}{render_expr(s.target)} = {render_expr(s.value)};")
    elif isinstance(s, ExprStmt):
        out.append(f"{pad}{render_expr(s.expr)};")
    elif isinstance(s, Return):
        out.append(f"{pad}return;" if s.value is None else f"{pad}return {render_expr(s.value)};")
    elif isinstance(s, Comment):
        out.append(f"{pad}// {s.text}")
    elif isinstance(s, If):
        out.append(f"{pad}if ({render_expr(s.cond)})")
        _block(s.then, level, out)
        if s.else_:
            out.append(pad + "else")
            _block(s.else_, level, out)
    elif isinstance(s, While):
        out.append(f"{pad}while ({render_expr(s.cond)})")
        _block(s.body, level, out)
    else:
        raise TypeError(f"not a statement: {s!r}")


def render_statements(stmts: Iterable[Stmt], indent: int = 0) -> str:
    out: list[str] = []
    for s in stmts:
        _stmt(s, indent, out)
    return "\n".join(out)


def render_program(prog: Program) -> str:
    out: list[str] = []
    for cls in prog.classes:
        out.append(f"class {cls.name}")
        out.append("{")
        for m in cls.methods:
            params = ", ".join(f"{p.type_name} {p.name}" for p in m.params)
            out.append(f"{INDENT}{m.return_type} {m.name}({params})")
            _block(m.body, 1, out)
        out.append("}")
    return "\n".join(out) + ("\n" if out else "")
