"""Framework API universe: declared types, their members, and the API vocabulary.

Every parse, extraction and synthesis step resolves members against a
:class:`Registry`.  The vocabulary order is fixed at load time; the position of
an :class:`ApiRef` in ``api_vocab`` is its dimension in sparse vectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

BUILTIN_TYPES = ("int", "bool", "string", "void")
BUILTIN_VALUE_TYPES = ("int", "bool")

METHOD = "method"
GET = "get"
SET = "set"
CONSTRUCTOR = "new"
KINDS = (METHOD, GET, SET, CONSTRUCTOR)


class RegistryError(ValueError):
    """Malformed registry file or invalid declaration."""

    def __init__(self, message: str, line: Optional[int] = None, subject: Optional[str] = None,
                 last: bool = False):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        # name to look for in the source text when no line is known yet
        self.subject = subject
        self.last = last


class AmbiguousMemberError(RegistryError):
    pass


@dataclass(frozen=True, order=True)
class ApiRef:
    """A fully qualified framework member."""

    declaring_type: str
    member: str
    kind: str
    arg_types: tuple[str, ...] = ()
    return_type: str = "void"
    is_static: bool = False

    def __str__(self) -> str:
        if self.kind == GET:
            return f"get({self.declaring_type}.{self.member})"
        if self.kind == SET:
            return f"set({self.declaring_type}.{self.member})"
        args = ",".join(self.arg_types)
        if self.kind == CONSTRUCTOR:
            return f"new {self.declaring_type}({args})"
        return f"{self.declaring_type}.{self.member}({args})"

    @property
    def value_type(self) -> str:
        """Type of the value this action produces (field type for get/set)."""
        return self.return_type

    def to_json(self) -> dict:
        return {
            "type": self.declaring_type,
            "member": self.member,
            "kind": self.kind,
            "args": list(self.arg_types),
            "returns": self.return_type,
            "static": self.is_static,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ApiRef":
        return cls(d["type"], d["member"], d["kind"], tuple(d["args"]), d["returns"], bool(d["static"]))


@dataclass(frozen=True)
class MethodDecl:
    name: str
    arg_types: tuple[str, ...]
    arg_names: tuple[Optional[str], ...]
    returns: str
    static: bool = False


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: str
    static: bool = False


@dataclass(frozen=True)
class TypeDecl:
    name: str
    kind: str  # "value" | "reference"
    constructors: tuple[MethodDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    fields: tuple[FieldDecl, ...] = ()


@dataclass
class Registry:
    types: dict[str, TypeDecl] = field(default_factory=dict)
    api_vocab: list[ApiRef] = field(default_factory=list)
    # formal parameter names, keyed by the callable ApiRef
    param_names: dict[ApiRef, tuple[Optional[str], ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._index = {api: i for i, api in enumerate(self.api_vocab)}
        self._by_name: dict[tuple[str, str], list[ApiRef]] = {}
        self._by_display = {str(api): api for api in self.api_vocab}
        for api in self.api_vocab:
            self._by_name.setdefault((api.declaring_type, api.member), []).append(api)

    def __len__(self) -> int:
        return len(self.api_vocab)

    def index_of(self, api: ApiRef) -> int:
        return self._index[api]

    def __contains__(self, api: object) -> bool:
        return api in self._index

    def is_declared(self, type_name: str) -> bool:
        return type_name in self.types

    def is_known_type(self, type_name: str) -> bool:
        return type_name in self.types or type_name in BUILTIN_TYPES

    def is_reference_type(self, type_name: str) -> bool:
        if type_name == "string":
            return True
        decl = self.types.get(type_name)
        return decl is not None and decl.kind == "reference"

    def members_named(self, type_name: str, member: str) -> list[ApiRef]:
        return list(self._by_name.get((type_name, member), ()))

    def by_display(self, text: str) -> Optional[ApiRef]:
        return self._by_display.get(text)

    def instance_members(self, type_name: str) -> list[ApiRef]:
        return [a for a in self.api_vocab
                if a.declaring_type == type_name and not a.is_static and a.kind != CONSTRUCTOR]


def _arg(entry: Union[str, dict]) -> tuple[str, Optional[str]]:
    if isinstance(entry, str):
        return entry, None
    return entry["type"], entry.get("name")


def _line_of(text: str, needle: str, last: bool = False) -> Optional[int]:
    pos = text.rfind(needle) if last else text.find(needle)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else None


def build_registry(types: Sequence[TypeDecl]) -> Registry:
    """Validate declarations and enumerate the vocabulary in declaration order."""
    table: dict[str, TypeDecl] = {}
    for t in types:
        if t.name in table or t.name in BUILTIN_TYPES:
            raise RegistryError(f"duplicate type {t.name!r}", subject=t.name, last=True)
        if t.kind not in ("value", "reference"):
            raise RegistryError(f"type {t.name!r}: kind must be 'value' or 'reference'", subject=t.kind)
        table[t.name] = t

    def check_type(name: str, where: str, allow_void: bool = False) -> None:
        if name == "void" and not allow_void:
            raise RegistryError(f"{where}: void is not a value type", subject="void")
        if name not in table and name not in BUILTIN_TYPES:
            raise RegistryError(f"{where}: unknown type {name!r}", subject=name)

    vocab: list[ApiRef] = []
    params: dict[ApiRef, tuple[Optional[str], ...]] = {}
    for t in types:
        seen: set[tuple[str, tuple[str, ...]]] = set()

        def claim(name: str, args: tuple[str, ...]) -> None:
            if (name, args) in seen:
                raise RegistryError(f"duplicate member {t.name}.{name}({','.join(args)})", subject=name, last=True)
            seen.add((name, args))

        for ctor in t.constructors:
            for a in ctor.arg_types:
                check_type(a, f"{t.name} constructor")
            claim("new", ctor.arg_types)
            api = ApiRef(t.name, "new", CONSTRUCTOR, ctor.arg_types, t.name, True)
            vocab.append(api)
            params[api] = ctor.arg_names
        for m in t.methods:
            if m.name == "new":
                raise RegistryError(f"{t.name}: 'new' is reserved for constructors", subject="new")
            for a in m.arg_types:
                check_type(a, f"{t.name}.{m.name}")
            check_type(m.returns, f"{t.name}.{m.name}", allow_void=True)
            claim(m.name, m.arg_types)
            api = ApiRef(t.name, m.name, METHOD, m.arg_types, m.returns, m.static)
            vocab.append(api)
            params[api] = m.arg_names
        for f in t.fields:
            check_type(f.type, f"{t.name}.{f.name}")
            claim(f.name, ())
            vocab.append(ApiRef(t.name, f.name, GET, (), f.type, f.static))
            vocab.append(ApiRef(t.name, f.name, SET, (), f.type, f.static))
    return Registry(types=table, api_vocab=vocab, param_names=params)


def _parse_types(doc: dict) -> list[TypeDecl]:
    out = []
    for t in doc.get("types", []):
        ctors = []
        for c in t.get("constructors", []):
            pairs = [_arg(a) for a in c]
            ctors.append(MethodDecl("new", tuple(p[0] for p in pairs), tuple(p[1] for p in pairs),
                                    t["name"], True))
        methods = []
        for m in t.get("methods", []):
            pairs = [_arg(a) for a in m.get("args", [])]
            methods.append(MethodDecl(m["name"], tuple(p[0] for p in pairs), tuple(p[1] for p in pairs),
                                      m.get("returns", "void"), bool(m.get("static", False))))
        fields = [FieldDecl(f["name"], f["type"], bool(f.get("static", False))) for f in t.get("fields", [])]
        out.append(TypeDecl(t["name"], t.get("kind", "reference"), tuple(ctors), tuple(methods), tuple(fields)))
    return out


def load_registry(path: Union[str, Path]) -> Registry:
    """Load and validate a JSON registry file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise RegistryError(f"invalid JSON: {e.msg}", e.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("types", []), list):
        raise RegistryError("top level must be an object with a 'types' list", 1)
    try:
        types = _parse_types(doc)
    except (KeyError, TypeError) as e:
        raise RegistryError(f"malformed declaration: {e}") from None
    try:
        return build_registry(types)
    except RegistryError as e:
        if e.line is None and e.subject is not None:
            raise RegistryError(str(e), _line_of(text, f'"{e.subject}"', e.last)) from None
        raise


def _compatible(reg: Registry, actual: Optional[str], formal: str) -> bool:
    if actual is None:
        return True
    if actual == "null":
        return reg.is_reference_type(formal)
    return actual == formal


def resolve_member(reg: Registry, type_name: str, member: str,
                   arg_types: Optional[Iterable[Optional[str]]] = None,
                   kind: Optional[str] = None, static: Optional[bool] = None) -> Optional[ApiRef]:
    """Find the unique member of ``type_name`` matching the call shape.

    ``arg_types`` entries may be ``None`` (unknown) or ``"null"`` (matches any
    reference type).  Field lookups pass ``kind=GET`` or ``kind=SET``.
    ``static`` restricts the search to static or instance members.
    Returns ``None`` when nothing (or more than one overload) matches.
    """
    cands = reg.members_named(type_name, member)
    if static is not None:
        cands = [c for c in cands if c.is_static == static or c.kind == CONSTRUCTOR]
    if kind is not None:
        cands = [c for c in cands if c.kind == kind]
    else:
        cands = [c for c in cands if c.kind in (METHOD, CONSTRUCTOR)]
    if kind in (GET, SET):
        if len(cands) > 1:
            raise AmbiguousMemberError(f"{type_name}.{member} declared twice")
        return cands[0] if cands else None
    args = tuple(arg_types or ())
    exact = [c for c in cands if c.arg_types == args]
    if len(exact) == 1:
        return exact[0]
    if len(exact) > 1:
        raise AmbiguousMemberError(f"{type_name}.{member}({','.join(args)}) declared twice")
    loose = [c for c in cands if len(c.arg_types) == len(args)
             and all(_compatible(reg, a, f) for a, f in zip(args, c.arg_types))]
    return loose[0] if len(loose) == 1 else None


def default_literal(reg: Registry, type_name: str) -> str:
    """Source text of the default value of ``type_name``."""
    if type_name == "int":
        return "0"
    if type_name == "bool":
        return "false"
    if type_name == "string":
        return "null"
    decl = reg.types.get(type_name)
    if decl is None:
        raise RegistryError(f"unknown type {type_name!r}")
    return "null" if decl.kind == "reference" else f"default({type_name})"
