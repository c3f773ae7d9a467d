"""Lexer and recursive-descent parser for MiniLang.

Grammar::

    program   := class*
    class     := 'class' IDENT '{' method* '}'
    method    := modifier* type IDENT '(' [param (',' param)*] ')' block
    block     := '{' stmt* '}'
    stmt      := 'var' IDENT '=' expr ';'
               | 'if' '(' cond ')' block ['else' (block | if)]
               | 'while' '(' cond ')' block
               | 'return' [expr] ';'
               | expr '=' expr ';'          (target is a variable or field)
               | expr ';'
    cond      := expr ['==' expr]
    expr      := primary ('.' IDENT ['(' args ')'])*
    primary   := INT | STRING | 'true' | 'false' | 'null'
               | 'new' IDENT '(' args ')' | 'default' '(' IDENT ')'
               | IDENT ['(' args ')'] | '(' expr ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (Assign, Call, ClassDecl, Default, Eq, Expr, ExprStmt, FieldGet, If, Literal,
                     MethodBody, New, Param, Program, Return, Stmt, Var, VarDecl, While)

KEYWORDS = frozenset({
    "class", "var", "if", "else", "while", "return", "new", "true", "false", "null", "void",
    "default", "public", "private", "protected", "static", "int", "bool", "string",
})
MODIFIERS = frozenset({"public", "private", "protected", "static"})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|[{}();,.=])
""", re.VERBOSE | re.DOTALL)


class ParseError(SyntaxError):
    def __init__(self, message: str, line: int, col: int, token: str = ""):
        super().__init__(f"{line}:{col}: {message}" + (f" (at {token!r})" if token else ""))
        self.line, self.col, self.token = line, col, token


@dataclass(frozen=True)
class Token:
    kind: str  # int | string | ident | keyword | op | eof
    text: str
    line: int
    col: int

    @property
    def pos(self):
        return (self.line, self.col)


def tokenize(source: str) -> list[Token]:
    out = []
    i, line, line_start = 0, 1, 0
    n = len(source)
    while i < n:
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError("unexpected character", line, i - line_start + 1, source[i])
        kind, text = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = "keyword"
            out.append(Token(kind, text, line, i - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = i + text.rfind("\n") + 1
        i = m.end()
    out.append(Token("eof", "", line, i - line_start + 1))
    return out


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str):
        t = self.tok
        raise ParseError(message, t.line, t.col, t.text or "<eof>")

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "keyword")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        t = self.tok
        self.i += 1
        return t

    def type_name(self) -> str:
        if self.tok.kind == "keyword" and self.tok.text in ("void", "int", "bool", "string"):
            t = self.tok
            self.i += 1
            return t.text
        return self.ident().text

    # -- declarations --

    def program(self) -> Program:
        classes = []
        while self.tok.kind != "eof":
            classes.append(self.class_decl())
        return Program(tuple(classes))

    def class_decl(self) -> ClassDecl:
        while self.tok.text in MODIFIERS:
            self.i += 1
        start = self.expect("class")
        name = self.ident().text
        self.expect("{")
        methods = []
        while not self.at("}"):
            methods.append(self.method())
        self.expect("}")
        return ClassDecl(name, tuple(methods), start.pos)

    def method(self) -> MethodBody:
        start = self.tok
        while self.tok.text in MODIFIERS:
            self.i += 1
        ret = self.type_name()
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                p = self.tok
                ptype = self.type_name()
                params.append(Param(ptype, self.ident().text, p.pos))
                if not self.accept(","):
                    break
        self.expect(")")
        return MethodBody(ret, name, tuple(params), self.block(), start.pos)

    # -- statements --

    def block(self) -> tuple[Stmt, ...]:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            stmts.append(self.statement())
        self.expect("}")
        return tuple(stmts)

    def statement(self) -> Stmt:
        t = self.tok
        if self.accept("var"):
            name = self.ident().text
            self.expect("=")
            init = self.expr()
            self.expect(";")
            return VarDecl(name, init, t.pos)
        if self.at("if"):
            return self.if_stmt()
        if self.accept("while"):
            self.expect("(")
            cond = self.condition()
            self.expect(")")
            return While(cond, self.block(), t.pos)
        if self.accept("return"):
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return Return(value, t.pos)
        e = self.expr()
        if self.accept("="):
            if not isinstance(e, (Var, FieldGet)):
                raise ParseError("invalid assignment target", t.line, t.col, t.text)
            value = self.expr()
            self.expect(";")
            return Assign(e, value, t.pos)
        self.expect(";")
        return ExprStmt(e, t.pos)

    def if_stmt(self) -> If:
        t = self.expect("if")
        self.expect("(")
        cond = self.condition()
        self.expect(")")
        then = self.block()
        else_: tuple[Stmt, ...] = ()
        if self.accept("else"):
            else_ = (self.if_stmt(),) if self.at("if") else self.block()
        return If(cond, then, else_, t.pos)

    # -- expressions --

    def condition(self) -> Expr:
        left = self.expr()
        if self.at("=="):
            t = self.tok
            self.i += 1
            return Eq(left, self.expr(), t.pos)
        return left

    def args(self) -> tuple[Expr, ...]:
        self.expect("(")
        out = []
        if not self.at(")"):
            while True:
                out.append(self.expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(out)

    def expr(self) -> Expr:
        e = self.primary()
        while self.accept("."):
            name = self.ident()
            if self.at("("):
                e = Call(e, name.text, self.args(), name.pos)
            else:
                e = FieldGet(e, name.text, name.pos)
        return e

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Literal("int", t.text, t.pos)
        if t.kind == "string":
            self.i += 1
            return Literal("string", t.text, t.pos)
        if t.kind == "keyword":
            if t.text in ("true", "false"):
                self.i += 1
                return Literal("bool", t.text, t.pos)
            if t.text == "null":
                self.i += 1
                return Literal("null", "null", t.pos)
            if t.text == "new":
                self.i += 1
                name = self.ident()
                return New(name.text, self.args(), name.pos)
            if t.text == "default":
                self.i += 1
                self.expect("(")
                name = self.type_name()
                self.expect(")")
                return Default(name, t.pos)
            # builtin type names may receive static calls in prose-free code; not supported
            self.error("unexpected keyword")
        if t.kind == "ident":
            self.i += 1
            if self.at("("):
                return Call(None, t.text, self.args(), t.pos)
            return Var(t.text, t.pos)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected expression")


def parse_program(source: str) -> Program:
    """Parse a MiniLang compilation unit; raises :class:`ParseError`."""
    return Parser(source).program()


def parse_statements(source: str) -> tuple[Stmt, ...]:
    """Parse a bare statement list (a snippet or a code fragment)."""
    p = Parser("{" + source + "\n}")
    stmts = p.block()
    if p.tok.kind != "eof":
        p.error("trailing input")
    return stmts
