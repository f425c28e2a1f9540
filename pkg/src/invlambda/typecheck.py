"""Simple types (atoms and arrows) and unification-based type inference."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .terms import SEXPR, App, Const, Lam, Term, Var, spine


class TypeClash(TypeError):
    pass


@dataclass(frozen=True)
class Atomic:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    frm: "TermType"
    to: "TermType"

    def __str__(self):
        left = f"({self.frm})" if isinstance(self.frm, Arrow) else str(self.frm)
        return f"{left} -> {self.to}"


@dataclass(frozen=True)
class TypeVar:
    id: int

    def __str__(self):
        return f"'a{self.id}"


TermType = Atomic | Arrow | TypeVar


def arity(t: TermType) -> int:
    n = 0
    while isinstance(t, Arrow):
        n += 1
        t = t.to
    return n


def parse_type(text: str) -> TermType:
    """Parse ``e -> (e -> t) -> t``; arrows associate to the right."""
    toks = re.findall(r"->|[()]|[A-Za-z_][A-Za-z0-9_]*", text)
    if "".join(toks) != re.sub(r"\s+", "", text):
        raise ValueError(f"bad type syntax: {text!r}")
    pos = 0

    def unit():
        nonlocal pos
        if pos >= len(toks):
            raise ValueError(f"truncated type: {text!r}")
        tok = toks[pos]
        pos += 1
        if tok == "(":
            t = arrow()
            if pos >= len(toks) or toks[pos] != ")":
                raise ValueError(f"unbalanced parentheses in type: {text!r}")
            pos += 1
            return t
        if tok in (")", "->"):
            raise ValueError(f"unexpected {tok!r} in type: {text!r}")
        return Atomic(tok)

    def arrow():
        nonlocal pos
        left = unit()
        if pos < len(toks) and toks[pos] == "->":
            pos += 1
            return Arrow(left, arrow())
        return left

    t = arrow()
    if pos != len(toks):
        raise ValueError(f"trailing input in type: {text!r}")
    return t


@dataclass
class Signature:
    """Constant name -> type, with arity-based defaulting for unknown names."""

    types: dict[str, TermType] = field(default_factory=dict)
    default: Atomic = Atomic("e")

    def lookup(self, name: str, arity: int = 0) -> TermType:
        if name in self.types:
            return self.types[name]
        t: TermType = self.default
        for _ in range(arity):
            t = Arrow(self.default, t)
        return t

    def __contains__(self, name):
        return name in self.types

    @classmethod
    def from_text(cls, text: str, default: str = "e") -> "Signature":
        types = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            name, sep, ty = line.partition(":")
            if not sep:
                raise ValueError(f"line {lineno}: expected 'name : type'")
            types[name.strip()] = parse_type(ty)
        return cls(types, Atomic(default))


class _Unifier:
    def __init__(self):
        self.subst: dict[int, TermType] = {}
        self.counter = itertools.count()

    def fresh(self) -> TypeVar:
        return TypeVar(next(self.counter))

    def resolve(self, t):
        while isinstance(t, TypeVar) and t.id in self.subst:
            t = self.subst[t.id]
        return t

    def zonk(self, t):
        t = self.resolve(t)
        if isinstance(t, Arrow):
            return Arrow(self.zonk(t.frm), self.zonk(t.to))
        return t

    def occurs(self, v: TypeVar, t) -> bool:
        t = self.resolve(t)
        if t == v:
            return True
        return isinstance(t, Arrow) and (self.occurs(v, t.frm) or self.occurs(v, t.to))

    def unify(self, a, b):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TypeVar):
            if self.occurs(a, b):
                raise TypeClash(f"infinite type {a} ~ {self.zonk(b)}")
            self.subst[a.id] = b
        elif isinstance(b, TypeVar):
            self.unify(b, a)
        elif isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.frm, b.frm)
            self.unify(a.to, b.to)
        else:
            raise TypeClash(f"cannot unify {self.zonk(a)} with {self.zonk(b)}")


def _observed_arity(t: Term) -> dict[str, int]:
    seen: dict[str, int] = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, App):
            head, args = spine(s)
            if isinstance(head, Const):
                seen[head.name] = max(seen.get(head.name, 0), len(args))
            else:
                stack.append(head)
            stack.extend(args)
        elif isinstance(s, Lam):
            stack.append(s.body)
        elif isinstance(s, Const):
            seen.setdefault(s.name, 0)
    return seen


def infer_type(t: Term, sig: Signature | None = None) -> TermType:
    """Principal simple type of ``t``; unresolved positions stay type variables.

    S-expression nodes are treated as opaque: each item is checked on its
    own and the whole node gets the signature's default atom.
    """
    sig = sig or Signature()
    u = _Unifier()
    arities = _observed_arity(t)
    const_types: dict[str, TermType] = {}

    def const_type(name):
        if name not in const_types:
            if name in sig:
                const_types[name] = sig.lookup(name)
            else:
                const_types[name] = sig.lookup(name, arities.get(name, 0))
        return const_types[name]

    def go(s, env):
        if isinstance(s, Var):
            if s.name not in env:
                env[s.name] = u.fresh()  # open term: free variable gets a fresh type
            return env[s.name]
        if isinstance(s, Const):
            return const_type(s.name)
        if isinstance(s, Lam):
            a = u.fresh()
            body = go(s.body, {**env, s.var: a})
            return Arrow(a, body)
        head, args = spine(s)
        if isinstance(head, Const) and head.name == SEXPR:
            for a in args:
                go(a, env)
            return sig.default
        fn = go(s.fn, env)
        arg = go(s.arg, env)
        res = u.fresh()
        u.unify(fn, Arrow(arg, res))
        return res

    return _normalize_vars(u.zonk(go(t, {})))


def _normalize_vars(t: TermType) -> TermType:
    mapping: dict[int, int] = {}

    def go(s):
        if isinstance(s, TypeVar):
            mapping.setdefault(s.id, len(mapping))
            return TypeVar(mapping[s.id])
        if isinstance(s, Arrow):
            return Arrow(go(s.frm), go(s.to))
        return s

    return go(t)
