"""Snippet synthesis from structured call sequences.

A rooted SCS is turned into MiniLang statements: the usage part is generated
first, then the creation.  Creations through an instance member of another
type ``U`` need a receiver object; it is synthesized from the best-ranked SCS
over ``U`` that invokes the creating member (the *tracer*), with the target
object's code spliced in right after that invocation.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import scs as S
from .align import DEFAULT_FILTER, TranslationTable, UnigramStats, api_posterior, tokenize_query
from .extract import NameModel, ScsIndex, root_type_of
from .minilang import (KEYWORDS, Assign, Call, Comment, Default, Eq, ExprStmt, FieldGet, If, Literal, New, Var,
                       VarDecl, While, render_statements)
from .rank import DEFAULT_TOP_K, query_vector, retrieve
from .registry import BUILTIN_TYPES, CONSTRUCTOR, GET, METHOD, SET, ApiRef, Registry, default_literal
from .scs import SparseVector

log = logging.getLogger(__name__)

DEFAULT_DEPTH = 3
TRUE = Literal("bool", "true")


class Unsynthesizable(ValueError):
    """The SCS cannot be rendered (e.g. a void action used as a condition)."""


# -- naming ---------------------------------------------------------------------

@dataclass
class NamingContext:
    name_model: NameModel = field(default_factory=NameModel)
    forbidden: set[str] = field(default_factory=lambda: set(KEYWORDS))
    fallback_counter: int = 1
    # (role, name, source) with source one of mined | formal | fallback
    picks: list[tuple[str, str, str]] = field(default_factory=list)

    @classmethod
    def fresh(cls, name_model: NameModel, reg: Optional[Registry] = None) -> "NamingContext":
        forbidden = set(KEYWORDS)
        if reg is not None:
            # a local shadowing a type name would turn static calls into instance calls
            forbidden |= set(reg.types)
        return cls(name_model, forbidden)

    def copy(self) -> "NamingContext":
        return NamingContext(self.name_model, set(self.forbidden), self.fallback_counter, list(self.picks))

    def bound_names(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for role, name, _ in self.picks:
            key, n = role, 1
            while key in out:
                n += 1
                key = f"{role}#{n}"
            out[key] = name
        return out


def pick_name(candidates: Sequence[str], ctx: NamingContext, role: str = "", source: str = "mined") -> str:
    for name in candidates:
        if name and name not in ctx.forbidden:
            ctx.forbidden.add(name)
            ctx.picks.append((role, name, source))
            return name
    while f"var{ctx.fallback_counter}" in ctx.forbidden:
        ctx.fallback_counter += 1
    name = f"var{ctx.fallback_counter}"
    ctx.forbidden.add(name)
    ctx.picks.append((role, name, "fallback"))
    return name


def type_name_candidate(type_name: str) -> str:
    """``StreamReader`` -> ``streamReader``, ``MD5`` -> ``md5``."""
    m = re.match(r"[A-Z]+(?=[A-Z][a-z]|$|\d)|[A-Z]", type_name)
    if not m:
        return type_name
    return type_name[:m.end()].lower() + type_name[m.end():]


def object_names(ctx: NamingContext, api: ApiRef) -> list[tuple[str, str]]:
    """Mined names for the value of ``api``, then one derived from its type."""
    out = [(n, "mined") for n in ctx.name_model.candidates(api)]
    if api.return_type not in BUILTIN_TYPES:
        out.append((type_name_candidate(api.return_type), "type"))
    return out


def pick_object_name(ctx: NamingContext, api: ApiRef, role: str) -> str:
    for name, source in object_names(ctx, api):
        if name not in ctx.forbidden:
            return pick_name([name], ctx, role, source)
    return pick_name([], ctx, role)


# -- small builders -----------------------------------------------------------------

def default_expr(reg: Registry, type_name: str):
    text = default_literal(reg, type_name)
    if text == "null":
        return Literal("null", "null")
    if text == "0":
        return Literal("int", "0")
    if text == "false":
        return Literal("bool", "false")
    return Default(type_name)


def synth_arguments(api: ApiRef, ctx: NamingContext, reg: Registry) -> tuple[list, list]:
    """``var <formal> = <default>;`` per argument, and the names to pass."""
    formals = reg.param_names.get(api, ())
    decls, names = [], []
    for i, t in enumerate(api.arg_types):
        formal = formals[i] if i < len(formals) else None
        name = pick_name([formal] if formal else [], ctx, role=f"arg:{api}:{i}", source="formal")
        decls.append(VarDecl(name, default_expr(reg, t)))
        names.append(Var(name))
    return decls, names


def _access(api: ApiRef, receiver, args=()):
    if api.kind == GET:
        return FieldGet(receiver, api.member)
    if api.kind == CONSTRUCTOR:
        return New(api.declaring_type, tuple(args))
    return Call(receiver, api.member, tuple(args))


def synth_condition(action: ApiRef, reg: Registry, receiver: str = "v", args=(),
                    idiomatic: bool = False):
    """``receiver.member(args) == default(U)`` for a value-producing action."""
    if action.kind not in (METHOD, GET) or action.return_type == "void":
        raise Unsynthesizable(f"{action} yields no value to test")
    recv = Var(action.declaring_type) if action.is_static else Var(receiver)
    expr = _access(action, recv, args)
    if idiomatic and action.return_type == "bool":
        return expr
    return Eq(expr, default_expr(reg, action.return_type))


@dataclass
class _Tracer:
    api: ApiRef
    target: str
    receiver: str
    inner: list
    done: bool = False


# -- code generation --------------------------------------------------------------------

class Synthesizer:
    def __init__(self, reg: Registry, index: ScsIndex, qv: SparseVector,
                 depth: int = DEFAULT_DEPTH, idiomatic_conditions: bool = False):
        self.reg = reg
        self.index = index
        self.qv = qv
        self.depth = depth
        self.idiomatic = idiomatic_conditions

    def code_gen(self, ch: S.Scs, v: str, ctx: NamingContext, depth: Optional[int] = None,
                 _tracer: Optional[_Tracer] = None) -> list:
        depth = self.depth if depth is None else depth
        items = S.elements(ch)
        if items and isinstance(items[0], S.Creation):
            inner = self._usage(S.seq(*items[1:]), v, ctx, _tracer)
            return self._creation(items[0].api, v, inner, ctx, depth)
        return self._usage(ch, v, ctx, _tracer)

    # usage ---------------------------------------------------------------------------

    def _usage(self, ch: S.Scs, v: str, ctx: NamingContext, tracer: Optional[_Tracer]) -> list:
        if isinstance(ch, S.Empty):
            return []
        if isinstance(ch, S.Seq):
            return [st for item in ch.items for st in self._usage(item, v, ctx, tracer)]
        if isinstance(ch, S.Unknown):
            return [Comment(f"{v} used elsewhere")]
        if isinstance(ch, S.Creation):
            raise Unsynthesizable("creation after the head of a sequence")
        if isinstance(ch, S.Action):
            if tracer is not None and not tracer.done and ch.api == tracer.api:
                return self._splice(tracer, ctx)
            return self._action(ch.api, v, ctx)
        if isinstance(ch, S.If):
            pre, cond = self._condition(ch.cond, v, ctx)
            then = self._usage(ch.then, v, ctx, tracer)
            else_ = self._usage(ch.else_, v, ctx, tracer)
            return pre + [If(cond, tuple(then), tuple(else_))]
        if isinstance(ch, S.While):
            pre, cond = self._condition(ch.cond, v, ctx)
            body = self._usage(ch.body, v, ctx, tracer)
            return pre + [While(cond, tuple(body))]
        raise TypeError(f"not an SCS: {ch!r}")

    def _receiver(self, api: ApiRef, v: str):
        return Var(api.declaring_type) if api.is_static else Var(v)

    def _action(self, api: ApiRef, v: str, ctx: NamingContext) -> list:
        recv = self._receiver(api, v)
        if api.kind == SET:
            return [Assign(FieldGet(recv, api.member), default_expr(self.reg, api.return_type))]
        if api.kind == GET:
            name = pick_object_name(ctx, api, f"value:{api}")
            return [VarDecl(name, FieldGet(recv, api.member))]
        if api.kind == CONSTRUCTOR:
            raise Unsynthesizable("constructor used as an action")
        decls, args = synth_arguments(api, ctx, self.reg)
        call = Call(recv, api.member, tuple(args))
        if api.return_type == "void":
            return decls + [ExprStmt(call)]
        name = pick_object_name(ctx, api, f"value:{api}")
        return decls + [VarDecl(name, call)]

    def _condition(self, cond: S.Scs, v: str, ctx: NamingContext):
        if isinstance(cond, S.Empty):
            return [], TRUE
        if isinstance(cond, S.Unknown):
            return [Comment(f"{v} used elsewhere")], TRUE
        if not isinstance(cond, S.Action):
            raise Unsynthesizable(f"condition is not a single action: {cond!r}")
        api = cond.api
        if api.kind not in (METHOD, GET) or api.return_type == "void":
            raise Unsynthesizable(f"{api} yields no value to test")
        decls, args = ([], []) if api.kind == GET else synth_arguments(api, ctx, self.reg)
        return decls, synth_condition(api, self.reg, v, tuple(args), self.idiomatic)

    # creation ------------------------------------------------------------------------

    def _creation(self, api: ApiRef, v: str, inner: list, ctx: NamingContext, depth: int) -> list:
        if api.kind == CONSTRUCTOR:
            decls, args = synth_arguments(api, ctx, self.reg)
            return decls + [VarDecl(v, New(api.declaring_type, tuple(args)))] + inner
        if api.kind not in (METHOD, GET):
            raise Unsynthesizable(f"{api} cannot create an object")
        if api.is_static:
            decls, args = ([], []) if api.kind == GET else synth_arguments(api, ctx, self.reg)
            return decls + [VarDecl(v, _access(api, Var(api.declaring_type), args))] + inner
        return self.construct_object(api, v, inner, ctx, depth)

    def construct_object(self, creation: ApiRef, v: str, inner: list, ctx: NamingContext,
                         depth: int) -> list:
        """Build a receiver of ``creation``'s declaring type, then bind ``v`` from it."""
        owner = creation.declaring_type
        if depth > 0:
            for group, _score in retrieve(self.qv, self.index, len(self.index), tracer=creation):
                if group.root_type != owner or not S.is_rooted(group.scs):
                    continue
                if not _statement_level(group.scs, creation):
                    continue
                trial = ctx.copy()
                try:
                    stmts = self._tracer_gen(group.scs, creation, v, inner, trial, depth - 1)
                except Unsynthesizable as e:
                    log.debug("receiver SCS %s skipped: %s", group.key, e)
                    continue
                ctx.__dict__.update(trial.__dict__)
                return stmts
        decls, args = ([], []) if creation.kind == GET else synth_arguments(creation, ctx, self.reg)
        return decls + [VarDecl(v, _access(creation, Default(owner), args))] + inner

    def _tracer_gen(self, ch_u: S.Scs, tracer: ApiRef, v: str, inner: list, ctx: NamingContext,
                    depth: int) -> list:
        head = S.creation_of(ch_u)
        u = pick_object_name(ctx, head.api, f"receiver:{root_type_of(ch_u)}")
        hook = _Tracer(tracer, v, u, inner)
        stmts = self.code_gen(ch_u, u, ctx, depth, hook)
        if not hook.done:
            raise Unsynthesizable(f"tracer {tracer} not reached")
        return stmts

    def _splice(self, hook: _Tracer, ctx: NamingContext) -> list:
        hook.done = True
        api = hook.api
        decls, args = ([], []) if api.kind == GET else synth_arguments(api, ctx, self.reg)
        return decls + [VarDecl(hook.target, _access(api, Var(hook.receiver), args))] + hook.inner


def _statement_level(ch: S.Scs, api: ApiRef) -> bool:
    """Whether ``api`` occurs as an action outside any condition."""
    if isinstance(ch, S.Action):
        return ch.api == api
    if isinstance(ch, S.Seq):
        return any(_statement_level(i, api) for i in ch.items)
    if isinstance(ch, S.If):
        return _statement_level(ch.then, api) or _statement_level(ch.else_, api)
    if isinstance(ch, S.While):
        return _statement_level(ch.body, api)
    return False


def code_gen(ch: S.Scs, v: str, ctx: NamingContext, index: ScsIndex, qv: SparseVector,
             depth: int = DEFAULT_DEPTH, reg: Optional[Registry] = None,
             idiomatic_conditions: bool = False) -> list:
    if reg is None:
        raise ValueError("a registry is required")
    return Synthesizer(reg, index, qv, depth, idiomatic_conditions).code_gen(ch, v, ctx, depth)


# -- pipeline ----------------------------------------------------------------------------

@dataclass
class Snippet:
    statements: list
    root_scs: S.Scs
    root_type: str
    score: float
    key: str
    frequency: int
    bound_names: dict[str, str] = field(default_factory=dict)
    name_sources: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return render_statements(self.statements)


def synthesize_scs(ch: S.Scs, ctx: NamingContext, synth: Synthesizer) -> list:
    """Name the root object and generate the statements of a rooted SCS."""
    head = S.creation_of(ch)
    if head is None:
        raise Unsynthesizable("SCS has no leading creation")
    v = pick_object_name(ctx, head.api, "root")
    return synth.code_gen(ch, v, ctx)


def synthesize(query: str, table: TranslationTable, stats: UnigramStats, index: ScsIndex,
               names: NameModel, reg: Registry, m: int = 10, depth: int = DEFAULT_DEPTH,
               top_k: int = DEFAULT_TOP_K, stop=DEFAULT_FILTER,
               idiomatic_conditions: bool = False) -> list[Snippet]:
    """Answer a natural-language query with up to ``m`` ranked snippets."""
    tokens = tokenize_query(query, stop)
    if not tokens:
        log.info("query %r has no usable tokens", query)
        return []
    posterior = api_posterior(tokens, table, stats, reg)
    if not posterior:
        log.info("no API is associated with any token of %r", query)
        return []
    qv = query_vector(posterior, reg, top_k)
    synth = Synthesizer(reg, index, qv, depth, idiomatic_conditions)
    out: list[Snippet] = []
    for group, score in retrieve(qv, index, len(index)):
        if len(out) >= m or score <= 0.0:
            break
        if not S.is_rooted(group.scs):
            continue
        ctx = NamingContext.fresh(names, reg)
        try:
            stmts = synthesize_scs(group.scs, ctx, synth)
        except Unsynthesizable as e:
            log.info("skipping %s: %s", group.key, e)
            continue
        out.append(Snippet(stmts, group.scs, group.root_type, score, group.key, group.count,
                           ctx.bound_names(), [src for _, _, src in ctx.picks]))
    return out
