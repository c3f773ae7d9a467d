"""MiniLang: the small statically-typed language the corpus is written in."""

from .parser import KEYWORDS, ParseError, parse_program, parse_statements, tokenize
from .render import render_expr, render_program, render_statements
from .resolve import TypedMethod, TypedProgram, VarInfo, resolve_method, resolve_types
from .syntax import (Assign, Call, ClassDecl, Comment, Default, Eq, ExprStmt, FieldGet, If, Literal,
                     MethodBody, New, Param, Program, Return, Var, VarDecl, While, iter_methods)

__all__ = [
    "KEYWORDS", "ParseError", "parse_program", "parse_statements", "tokenize",
    "render_expr", "render_program", "render_statements",
    "TypedMethod", "TypedProgram", "VarInfo", "resolve_method", "resolve_types",
    "Assign", "Call", "ClassDecl", "Comment", "Default", "Eq", "ExprStmt", "FieldGet", "If",
    "Literal", "MethodBody", "New", "Param", "Program", "Return", "Var", "VarDecl", "While",
    "iter_methods",
]
