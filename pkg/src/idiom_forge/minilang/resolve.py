"""Best-effort type resolution and variable binding.

Annotations are kept in side tables keyed by node identity; the AST itself is
never modified.  Accesses that cannot be resolved against the registry are
recorded with a ``None`` ApiRef rather than dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..registry import GET, SET, ApiRef, Registry, resolve_member
from .syntax import (Assign, Call, Comment, Default, Eq, Expr, ExprStmt, FieldGet, If, Literal,
                     MethodBody, New, Param, Program, Return, Stmt, Var, VarDecl, While, iter_methods)

Node = Union[Expr, Stmt]


@dataclass(eq=False)
class VarInfo:
    key: int
    name: str
    type: Optional[str]
    decl: Union[VarDecl, Param]

    @property
    def is_param(self) -> bool:
        return isinstance(self.decl, Param)


@dataclass(eq=False)
class TypedMethod:
    method: MethodBody
    variables: list[VarInfo] = field(default_factory=list)
    expr_types: dict[int, Optional[str]] = field(default_factory=dict)
    # id(Call|New|FieldGet|Assign) -> ApiRef, or None when unresolved
    members: dict[int, Optional[ApiRef]] = field(default_factory=dict)
    bindings: dict[int, VarInfo] = field(default_factory=dict)  # id(Var) -> variable
    type_refs: set[int] = field(default_factory=set)  # id(Var) naming a registry type
    decls: dict[int, VarInfo] = field(default_factory=dict)  # id(VarDecl) -> variable
    sites: dict[int, Node] = field(default_factory=dict)  # id -> node, for every member access

    def type_of(self, e: Expr) -> Optional[str]:
        return self.expr_types.get(id(e))

    def member(self, node: Node) -> Optional[ApiRef]:
        return self.members.get(id(node))

    def is_unknown(self, node: Node) -> bool:
        return id(node) in self.members and self.members[id(node)] is None

    def member_sites(self):
        """(source position, ApiRef-or-None) of every member access, in source order."""
        rows = []
        for key, api in self.members.items():
            node = self.sites[key]
            pos = node.target.pos if isinstance(node, Assign) else node.pos
            rows.append((pos, len(rows), api))
        return [(pos, api) for pos, _, api in sorted(rows, key=lambda r: r[:2])]

    def binding(self, e: Expr) -> Optional[VarInfo]:
        return self.bindings.get(id(e)) if isinstance(e, Var) else None


@dataclass(eq=False)
class TypedProgram:
    program: Program
    methods: list[TypedMethod]


_LITERAL_TYPES = {"int": "int", "bool": "bool", "string": "string", "null": "null"}


class _Resolver:
    def __init__(self, reg: Registry, out: TypedMethod):
        self.reg = reg
        self.out = out
        self.scopes: list[dict[str, VarInfo]] = [{}]

    def declare(self, name: str, type_: Optional[str], decl) -> VarInfo:
        info = VarInfo(len(self.out.variables), name, type_, decl)
        self.out.variables.append(info)
        self.scopes[-1][name] = info
        return info

    def lookup(self, name: str) -> Optional[VarInfo]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def block(self, stmts) -> None:
        self.scopes.append({})
        for s in stmts:
            self.stmt(s)
        self.scopes.pop()

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, VarDecl):
            t = self.expr(s.init)
            self.out.decls[id(s)] = self.declare(s.name, t, s)
        elif isinstance(s, Assign):
            self.expr(s.value)
            if isinstance(s.target, FieldGet):
                rt = self.receiver(s.target.receiver)
                api = self._field(rt, s.target.name, SET)
                self.out.members[id(s)] = api
                self.out.sites[id(s)] = s
                self.out.expr_types[id(s.target)] = api.return_type if api else None
            else:
                self.expr(s.target)
        elif isinstance(s, ExprStmt):
            self.expr(s.expr)
        elif isinstance(s, Return):
            if s.value is not None:
                self.expr(s.value)
        elif isinstance(s, If):
            self.expr(s.cond)
            self.block(s.then)
            self.block(s.else_)
        elif isinstance(s, While):
            self.expr(s.cond)
            self.block(s.body)
        elif isinstance(s, Comment):
            pass
        else:
            raise TypeError(f"not a statement: {s!r}")

    def receiver(self, e: Expr) -> tuple[Optional[str], bool]:
        """Type of a receiver expression and whether it is a static type reference."""
        if isinstance(e, Var) and self.lookup(e.name) is None and self.reg.is_declared(e.name):
            self.out.type_refs.add(id(e))
            return e.name, True
        return self.expr(e), False

    def _field(self, recv: tuple[Optional[str], bool], name: str, kind: str) -> Optional[ApiRef]:
        rtype, static = recv
        if rtype is None or not self.reg.is_declared(rtype):
            return None
        return resolve_member(self.reg, rtype, name, kind=kind, static=static)

    def expr(self, e: Expr) -> Optional[str]:
        t = self._expr(e)
        self.out.expr_types[id(e)] = t
        return t

    def _expr(self, e: Expr) -> Optional[str]:
        if isinstance(e, Literal):
            return _LITERAL_TYPES[e.kind]
        if isinstance(e, Default):
            return e.type_name if self.reg.is_known_type(e.type_name) else None
        if isinstance(e, Var):
            info = self.lookup(e.name)
            if info is None:
                return None
            self.out.bindings[id(e)] = info
            return info.type
        if isinstance(e, Eq):
            self.expr(e.left)
            self.expr(e.right)
            return "bool"
        if isinstance(e, FieldGet):
            api = self._field(self.receiver(e.receiver), e.name, GET)
            self.out.members[id(e)] = api
            self.out.sites[id(e)] = e
            return api.return_type if api else None
        if isinstance(e, New):
            args = [self.expr(a) for a in e.args]
            api = None
            if self.reg.is_declared(e.type_name):
                api = resolve_member(self.reg, e.type_name, "new", args)
            self.out.members[id(e)] = api
            self.out.sites[id(e)] = e
            return e.type_name if self.reg.is_declared(e.type_name) else None
        if isinstance(e, Call):
            if e.receiver is None:
                for a in e.args:
                    self.expr(a)
                self.out.members[id(e)] = None
                self.out.sites[id(e)] = e
                return None
            rtype, static = self.receiver(e.receiver)
            args = [self.expr(a) for a in e.args]
            api = None
            if rtype is not None and self.reg.is_declared(rtype):
                api = resolve_member(self.reg, rtype, e.name, args, static=static)
            self.out.members[id(e)] = api
            self.out.sites[id(e)] = e
            if api is None or api.return_type == "void":
                return None
            return api.return_type
        raise TypeError(f"not an expression: {e!r}")


def resolve_method(method: MethodBody, reg: Registry) -> TypedMethod:
    out = TypedMethod(method)
    r = _Resolver(reg, out)
    for p in method.params:
        r.declare(p.name, p.type_name if reg.is_known_type(p.type_name) else None, p)
    r.block(method.body)
    return out


def resolve_types(prog: Program, reg: Registry) -> TypedProgram:
    """Annotate every method of ``prog``; never fails."""
    return TypedProgram(prog, [resolve_method(m, reg) for _, m in iter_methods(prog)])
