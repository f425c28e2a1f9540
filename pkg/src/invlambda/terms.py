"""Lambda terms: construction, concrete syntax, beta reduction, list replacement.

Terms are immutable and hash-consed by structure. Identifiers bound by an
enclosing ``\\x.`` are variables; every other identifier is a constant, as are
quoted tokens (``'new york'``), braced tokens (``{5}``) and numbers.

Juxtaposed items, as in the CLANG form ``(player our {5})``, become an
s-expression node: a curried application whose head is the reserved constant
``SEXPR``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterator, Sequence

SEXPR = "()"
DEFAULT_STEP_LIMIT = 10_000

_BINDER_NAMES = ("x", "y", "z", "w", "u", "v")


class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NonTerminating(RuntimeError):
    """Raised when beta reduction exceeds its step budget."""


class LengthMismatch(ValueError):
    pass


class Term:
    __slots__ = ("_hash", "_fv", "_canon", "_size")

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def _init(self, h):
        object.__setattr__(self, "_hash", h)
        object.__setattr__(self, "_fv", None)
        object.__setattr__(self, "_canon", None)
        object.__setattr__(self, "_size", None)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}<{render_term(self)}>"

    def __str__(self):
        return render_term(self)

    @property
    def free_vars(self) -> frozenset:
        if self._fv is None:
            object.__setattr__(self, "_fv", _free_vars(self))
        return self._fv

    @property
    def size(self) -> int:
        if self._size is None:
            if isinstance(self, App):
                n = 1 + self.fn.size + self.arg.size
            elif isinstance(self, Lam):
                n = 1 + self.body.size
            else:
                n = 1
            object.__setattr__(self, "_size", n)
        return self._size


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._init(hash(("Var", name)))

    def __eq__(self, other):
        return self is other or (type(other) is Var and other.name == self.name)

    __hash__ = Term.__hash__


class Const(Term):
    """A constant; ``type`` is an optional annotation ignored by equality."""

    __slots__ = ("name", "type")

    def __init__(self, name: str, type=None):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "type", type)
        self._init(hash(("Const", name)))

    def __eq__(self, other):
        return self is other or (type(other) is Const and other.name == self.name)

    __hash__ = Term.__hash__

    @property
    def quoted(self) -> bool:
        return self.name[:1] in ("'", '"')


class Lam(Term):
    __slots__ = ("var", "body")

    def __init__(self, var: str, body: Term):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)
        self._init(hash(("Lam", var, body._hash)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Lam and other._hash == self._hash
                and other.var == self.var and other.body == self.body)

    __hash__ = Term.__hash__


class App(Term):
    __slots__ = ("fn", "arg")

    def __init__(self, fn: Term, arg: Term):
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "arg", arg)
        self._init(hash(("App", fn._hash, arg._hash)))

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is App and other._hash == self._hash
                and other.fn == self.fn and other.arg == self.arg)

    __hash__ = Term.__hash__


def apply(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def lambdas(names: Sequence[str], body: Term) -> Term:
    for n in reversed(names):
        body = Lam(n, body)
    return body


def sexpr(*items: Term) -> Term:
    return apply(Const(SEXPR), *items)


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``f @ a1 @ ... @ an`` into ``(f, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def _free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    if isinstance(t, Lam):
        return t.body.free_vars - {t.var}
    return t.fn.free_vars | t.arg.free_vars


def constants(t: Term) -> set[str]:
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Const):
            out.add(s.name)
        elif isinstance(s, Lam):
            stack.append(s.body)
        elif isinstance(s, App):
            stack.extend((s.fn, s.arg))
    return out


def all_names(t: Term) -> set[str]:
    """Every identifier spelled in ``t``: constants, variables and binders."""
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, (Const, Var)):
            out.add(s.name)
        elif isinstance(s, Lam):
            out.add(s.var)
            stack.append(s.body)
        else:
            stack.extend((s.fn, s.arg))
    return out


def is_closed(t: Term) -> bool:
    return not t.free_vars


def fresh_name(base: str, avoid) -> str:
    stem = base.rstrip("0123456789") or "v"
    if stem not in avoid:
        return stem
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


# --------------------------------------------------------------------------
# concrete syntax

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<lam>\\|λ)
  | (?P<quoted>'[^']*'|"[^"]*")
  | (?P<braced>\{[^}]*\})
  | (?P<number>-?\d+(?:\.\d+)?(?![A-Za-z_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<dot>\.)
  | (?P<at>@)
  | (?P<comma>,)
  | (?P<lp>\()
  | (?P<rp>\))
""", re.VERBOSE)

_ATOM_START = {"ident", "quoted", "braced", "number", "lp"}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), m.start(), m.end()))
        pos = m.end()
    out.append(("eof", "", len(text), len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.used_binders: set[str] = set()

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = {"rp": "')'", "dot": "'.'", "ident": "identifier"}.get(kind, kind)
            raise TermSyntaxError(f"expected {want}, found {tok[1] or 'end of input'!r}",
                                  tok[2])
        self.i += 1
        return tok

    def term(self, scope: dict) -> Term:
        if self.peek()[0] == "lam":
            self.take()
            name = self.take("ident")[1]
            self.take("dot")
            # distinct binder names within one parsed term
            bound = name
            if name in self.used_binders:
                bound = fresh_name(name, self.used_binders | set(scope.values()))
            self.used_binders.add(bound)
            body = self.term({**scope, name: bound})
            return Lam(bound, body)
        left = self.seq(scope)
        while self.peek()[0] == "at":
            self.take()
            if self.peek()[0] == "lam":
                right = self.term(scope)
            else:
                right = self.seq(scope)
            left = App(left, right)
        return left

    def seq(self, scope: dict) -> Term:
        items = []
        while self.peek()[0] in _ATOM_START:
            items.append(self.call(scope))
        if not items:
            tok = self.peek()
            raise TermSyntaxError(f"expected a term, found {tok[1] or 'end of input'!r}",
                                  tok[2])
        if len(items) == 1:
            return items[0]
        return sexpr(*items)

    def call(self, scope: dict) -> Term:
        kind, text, start, end = self.peek()
        if kind == "ident":
            self.take()
            head = Var(scope[text]) if text in scope else Const(text)
            nxt = self.peek()
            # f(a, b) only when the parenthesis is adjacent; "do (x)" is juxtaposition
            if nxt[0] == "lp" and nxt[2] == end:
                self.take()
                args = [self.term(scope)]
                while self.peek()[0] == "comma":
                    self.take()
                    args.append(self.term(scope))
                self.take("rp")
                return apply(head, *args)
            return head
        if kind in ("quoted", "braced", "number"):
            self.take()
            return Const(text)
        if kind == "lp":
            self.take()
            inner = self.term(scope)
            self.take("rp")
            return inner
        raise TermSyntaxError(f"unexpected {text or 'end of input'!r}", start)


def parse_term(text: str) -> Term:
    """Parse the concrete term syntax, e.g. ``\\x. \\y. y @ loc_2(x)``."""
    p = _Parser(text)
    t = p.term({})
    tok = p.peek()
    if tok[0] != "eof":
        raise TermSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    return t


def _is_at_app(t: Term) -> bool:
    if not isinstance(t, App):
        return False
    head, _ = spine(t)
    return not isinstance(head, Const)


def _wrap(t: Term) -> str:
    s = render_term(t)
    if isinstance(t, Lam) or _is_at_app(t):
        return f"({s})"
    return s


def render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.var}. {render_term(t.body)}"
    head, args = spine(t)
    if isinstance(head, Const):
        if head.name == SEXPR:
            return "(" + " ".join(_wrap(a) for a in args) + ")"
        return f"{head.name}(" + ", ".join(render_term(a) for a in args) + ")"
    return " @ ".join([_wrap(head)] + [_wrap(a) for a in args])


# --------------------------------------------------------------------------
# substitution and reduction

def substitute(t: Term, name: str, value: Term) -> Term:
    """Capture-avoiding ``t[name := value]``."""
    if name not in t.free_vars:
        return t
    return _subst(t, name, value, value.free_vars)


def _subst(t, name, value, fv):
    if isinstance(t, Var):
        return value if t.name == name else t
    if isinstance(t, App):
        if name not in t.free_vars:
            return t
        return App(_subst(t.fn, name, value, fv), _subst(t.arg, name, value, fv))
    if isinstance(t, Lam):
        if t.var == name or name not in t.free_vars:
            return t
        var, body = t.var, t.body
        if var in fv:
            new = fresh_name(var, fv | all_names(body) | {name})
            body = _subst(body, var, Var(new), frozenset((new,)))
            var = new
        return Lam(var, _subst(body, name, value, fv))
    return t


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n):
        self.left = n

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise NonTerminating("beta reduction step limit exhausted")


def _whnf(t: Term, budget: _Budget) -> Term:
    if not isinstance(t, App):
        return t
    fn = _whnf(t.fn, budget)
    if isinstance(fn, Lam):
        budget.spend()
        return _whnf(substitute(fn.body, fn.var, t.arg), budget)
    return t if fn is t.fn else App(fn, t.arg)


def _nf(t: Term, budget: _Budget) -> Term:
    t = _whnf(t, budget)
    if isinstance(t, Lam):
        body = _nf(t.body, budget)
        return t if body is t.body else Lam(t.var, body)
    if isinstance(t, App):
        fn, arg = _nf(t.fn, budget), _nf(t.arg, budget)
        return t if (fn is t.fn and arg is t.arg) else App(fn, arg)
    return t


@lru_cache(maxsize=200_000)
def beta_normalize(t: Term, step_limit: int = DEFAULT_STEP_LIMIT) -> Term:
    """Leftmost-outermost normal form; raises NonTerminating past ``step_limit``."""
    if step_limit < 1:
        raise ValueError("step_limit must be >= 1")
    return _nf(t, _Budget(step_limit))


# --------------------------------------------------------------------------
# alpha equivalence

def canonical(t: Term) -> Term:
    """Alpha-rename binders to a fixed naming scheme (preorder binder order).

    Two terms are alpha-equivalent iff their canonical forms are equal.
    """
    if t._canon is None:
        taken = constants(t) | t.free_vars
        names = _binder_names(taken)
        c = _canon(t, {}, names)
        object.__setattr__(c, "_canon", c)
        object.__setattr__(t, "_canon", c)
    return t._canon


def _binder_names(taken):
    i = 0
    while True:
        base = _BINDER_NAMES[i % len(_BINDER_NAMES)]
        rnd = i // len(_BINDER_NAMES)
        name = base if rnd == 0 else f"{base}{rnd}"
        i += 1
        if name not in taken:
            yield name


def _canon(t, env, names):
    if isinstance(t, Var):
        n = env.get(t.name)
        return t if n is None or n == t.name else Var(n)
    if isinstance(t, Const):
        return t
    if isinstance(t, Lam):
        new = next(names)
        body = _canon(t.body, {**env, t.var: new}, names)
        return Lam(new, body)
    return App(_canon(t.fn, env, names), _canon(t.arg, env, names))


def alpha_equiv(a: Term, b: Term) -> bool:
    return a == b or canonical(a) == canonical(b)


def alpha_beta_equiv(a: Term, b: Term, step_limit: int = DEFAULT_STEP_LIMIT) -> bool:
    return alpha_equiv(beta_normalize(a, step_limit), beta_normalize(b, step_limit))


def normal_key(t: Term, step_limit: int = DEFAULT_STEP_LIMIT) -> Term:
    """Hashable key identifying ``t`` up to alpha-beta equivalence."""
    return canonical(beta_normalize(t, step_limit))


# --------------------------------------------------------------------------
# subterms and replacement

def iter_subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack.append(s.arg)
            stack.append(s.fn)
        elif isinstance(s, Lam):
            stack.append(s.body)


def subterms(t: Term) -> list[Term]:
    """Pre-order enumeration of subterms; ``t`` comes first."""
    return list(iter_subterms(t))


def replace(h: Term, a: Sequence[Term], b: Sequence[Term]) -> Term:
    """Simultaneously replace every occurrence of ``a[i]`` in ``h`` by ``b[i]``.

    Occurrences are matched up to alpha-equivalence, outermost first; a
    replaced occurrence is not searched again.
    """
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} patterns but {len(b)} replacements")
    if not a:
        return h
    keys = {}
    for pat, rep in zip(a, b):
        keys.setdefault(canonical(pat), rep)
    sizes = {k.size for k in keys}

    def go(t):
        if t.size in sizes:
            rep = keys.get(canonical(t))
            if rep is not None:
                return rep
        if isinstance(t, App):
            fn, arg = go(t.fn), go(t.arg)
            return t if (fn is t.fn and arg is t.arg) else App(fn, arg)
        if isinstance(t, Lam):
            body = go(t.body)
            return t if body is t.body else Lam(t.var, body)
        return t

    return go(h)
