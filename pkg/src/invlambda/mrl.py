"""Context-free grammars for meaning representations and their derivation trees.

A grammar file holds one rule per line::

    S -> "answer(" RIVER ")"
    RIVER -> "river(" RIVER ")" | "loc_2(" STATE ")"

Items in double quotes are terminals, bare words are nonterminals, the first
left-hand side is the start symbol and ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .terms import Term, TermSyntaxError, lambdas, parse_term

TERMINAL = "t"
NONTERMINAL = "nt"
VARIABLE = "var"


class GrammarError(ValueError):
    pass


class UndefinedSymbol(GrammarError):
    pass


class DuplicateProduction(GrammarError):
    pass


class NoDerivation(ValueError):
    pass


class AmbiguousDerivation(ValueError):
    pass


class UnparsableTemplate(ValueError):
    pass


class NotDominated(ValueError):
    pass


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[tuple[str, str], ...]      # (kind, text) pairs

    def __str__(self):
        items = [f'"{t}"' if k == TERMINAL else t for k, t in self.rhs]
        return f"{self.lhs} -> {' '.join(items)}"


@dataclass
class Grammar:
    start: str
    productions: dict[str, list[Production]] = field(default_factory=dict)

    @property
    def nonterminals(self) -> set[str]:
        return set(self.productions)

    @property
    def terminals(self) -> set[str]:
        return {t for prods in self.productions.values() for p in prods
                for k, t in p.rhs if k == TERMINAL}


_ITEM = re.compile(r'\s*(?:"((?:[^"\\]|\\.)*)"|([A-Za-z_][A-Za-z0-9_]*)|(\|))')


def load_cfg(text: str) -> Grammar:
    start = None
    prods: dict[str, list[Production]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        lhs, sep, rest = line.partition("->")
        lhs = lhs.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", lhs):
            raise GrammarError(f"line {lineno}: expected 'NONTERM -> items'")
        alternatives: list[list[tuple[str, str]]] = [[]]
        pos = 0
        rest = rest.rstrip()
        while pos < len(rest):
            m = _ITEM.match(rest, pos)
            if not m:
                raise GrammarError(f"line {lineno}: cannot read {rest[pos:]!r}")
            if m.group(1) is not None:
                alternatives[-1].append((TERMINAL, re.sub(r"\\(.)", r"\1", m.group(1))))
            elif m.group(2) is not None:
                alternatives[-1].append((NONTERMINAL, m.group(2)))
            else:
                alternatives.append([])
            pos = m.end()
        if start is None:
            start = lhs
        bucket = prods.setdefault(lhs, [])
        for alt in alternatives:
            if not alt:
                raise GrammarError(f"line {lineno}: empty right-hand side")
            if any(k == TERMINAL and not t.strip() for k, t in alt):
                raise GrammarError(f"line {lineno}: blank terminal")
            p = Production(lhs, tuple(alt))
            if p in bucket:
                raise DuplicateProduction(f"line {lineno}: duplicate production {p}")
            bucket.append(p)
    if start is None:
        raise GrammarError("grammar has no productions")
    for plist in prods.values():
        for p in plist:
            for k, sym in p.rhs:
                if k == NONTERMINAL and sym not in prods:
                    raise UndefinedSymbol(f"{sym} is used in '{p}' but never defined")
    return Grammar(start, prods)


def _strip_comment(line: str) -> str:
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"' and (i == 0 or line[i - 1] != "\\"):
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


# --------------------------------------------------------------------------
# derivation trees

@dataclass(frozen=True)
class DerivationTree:
    label: str
    children: tuple["DerivationTree", ...] = ()
    kind: str = NONTERMINAL

    @property
    def is_terminal(self) -> bool:
        return self.kind == TERMINAL

    @property
    def is_variable(self) -> bool:
        return self.kind == VARIABLE

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list["DerivationTree"]:
        if not self.children:
            return [self]
        return [lf for c in self.children for lf in c.leaves()]

    def yield_text(self) -> str:
        return _concat(lf.label for lf in self.leaves())

    def at(self, path: tuple[int, ...]) -> "DerivationTree":
        n = self
        for i in path:
            n = n.children[i]
        return n

    def paths(self) -> Iterator[tuple[int, ...]]:
        """Every node address, pre-order."""
        stack = [()]
        while stack:
            p = stack.pop()
            yield p
            n = self.at(p)
            for i in range(len(n.children) - 1, -1, -1):
                stack.append(p + (i,))

    def leaf_paths(self) -> list[tuple[int, ...]]:
        return [p for p in self.paths() if not self.at(p).children]

    def pretty(self, indent: int = 0) -> str:
        pad = "  " * indent
        if self.kind == TERMINAL:
            return f'{pad}"{self.label}"'
        if not self.children:
            return f"{pad}{self.label}"
        return "\n".join([f"{pad}{self.label}"] + [c.pretty(indent + 1) for c in self.children])


def terminal(text: str) -> DerivationTree:
    return DerivationTree(text, (), TERMINAL)


def _concat(parts: Iterable[str]) -> str:
    # a word glued to "(" would read as a call, and two words would fuse
    out = ""
    for p in parts:
        if out and p and _WORD_END.match(out[-1]) and _WORD_START.match(p[0]):
            out += " "
        out += p
    return out


_WORD_END = re.compile(r"[\w'\"}]")
_WORD_START = re.compile(r"[\w'\"{(]")


def _squash(s: str) -> str:
    return re.sub(r"\s+", "", s)


def derive(lf: str, g: Grammar) -> DerivationTree:
    """The unique derivation tree of ``lf`` (whitespace-insensitive chart parse)."""
    text = _squash(lf)
    terms = {t: _squash(t) for t in g.terminals}
    memo: dict[tuple[str, int], dict[int, list[DerivationTree]]] = {}
    active: set[tuple[str, int]] = set()

    def parse(sym: str, i: int) -> dict[int, list[DerivationTree]]:
        key = (sym, i)
        if key in memo:
            return memo[key]
        if key in active:
            return {}
        active.add(key)
        res: dict[int, list[DerivationTree]] = {}
        for prod in g.productions[sym]:
            partial: dict[int, list[tuple]] = {i: [()]}
            for kind, item in prod.rhs:
                nxt: dict[int, list[tuple]] = {}
                for pos, seqs in partial.items():
                    if kind == TERMINAL:
                        t = terms[item]
                        if text.startswith(t, pos):
                            _add(nxt, pos + len(t), [s + (terminal(item),) for s in seqs])
                    else:
                        for end, trees in parse(item, pos).items():
                            _add(nxt, end, [s + (tr,) for s in seqs for tr in trees])
                partial = nxt
                if not partial:
                    break
            for end, seqs in partial.items():
                _add(res, end, [DerivationTree(sym, s) for s in seqs])
        active.discard(key)
        memo[key] = res
        return res

    found = parse(g.start, 0).get(len(text), [])
    if not found:
        raise NoDerivation(f"{lf!r} is not in the language of the grammar")
    if len(found) > 1:
        raise AmbiguousDerivation(f"{lf!r} has more than one derivation")
    return found[0]


def _add(table, key, items, cap=2):
    bucket = table.setdefault(key, [])
    for it in items:
        if len(bucket) >= cap:
            return
        if it not in bucket:
            bucket.append(it)


# --------------------------------------------------------------------------
# lambda trees and common templates

@dataclass(frozen=True)
class LambdaTree:
    variables: tuple[str, ...]
    tree: DerivationTree

    def leaves(self) -> list[DerivationTree]:
        return self.tree.leaves()

    @property
    def is_trivial(self) -> bool:
        """A bare variable: the template says nothing."""
        return self.tree.is_variable


class _Diverge(Exception):
    pass


def common_template(t1: DerivationTree, t2: DerivationTree) -> LambdaTree | None:
    """Largest lambda tree rooted at the shared root of ``t1`` and ``t2``.

    Trees are compared level by level: matching terminals are kept, a
    nonterminal whose expansions differ becomes a fresh variable, and a
    terminal mismatch turns the enclosing nonterminal into a variable.
    """
    if t1.label != t2.label or t1.kind != t2.kind:
        return None

    def walk(a: DerivationTree, b: DerivationTree) -> DerivationTree:
        if a.kind == TERMINAL or b.kind == TERMINAL:
            if a.kind == b.kind and a.label == b.label:
                return a
            raise _Diverge
        if a.label != b.label:
            return DerivationTree("?", (), VARIABLE)
        if len(a.children) != len(b.children) or not a.children:
            return DerivationTree("?", (), VARIABLE) if a != b else a
        try:
            kids = tuple(walk(x, y) for x, y in zip(a.children, b.children))
        except _Diverge:
            return DerivationTree("?", (), VARIABLE)
        return DerivationTree(a.label, kids, a.kind)

    try:
        shape = walk(t1, t2)
    except _Diverge:
        return None
    return _number_variables(shape)


def _number_variables(shape: DerivationTree) -> LambdaTree:
    names: list[str] = []

    def go(n):
        if n.is_variable:
            name = f"v{len(names) + 1}"
            names.append(name)
            return DerivationTree(name, (), VARIABLE)
        if not n.children:
            return n
        return DerivationTree(n.label, tuple(go(c) for c in n.children), n.kind)

    tree = go(shape)
    return LambdaTree(tuple(names), tree)


def instantiates(lt: LambdaTree, t: DerivationTree) -> bool:
    """True when substituting subtrees for the variables of ``lt`` yields a subtree of ``t``."""

    def match(p: DerivationTree, n: DerivationTree) -> bool:
        if p.is_variable:
            return True
        if p.kind != n.kind or p.label != n.label or len(p.children) != len(n.children):
            return False
        return all(match(a, b) for a, b in zip(p.children, n.children))

    return any(match(lt.tree, t.at(path)) for path in t.paths())


def template_to_term(lt: LambdaTree) -> Term:
    """Concatenate the leaves of ``lt`` and abstract its variables, left to right."""
    text_parts = [lf.label for lf in lt.leaves() if not lf.is_variable]
    taken = set(re.findall(r"[A-Za-z_][A-Za-z0-9_\-]*", " ".join(text_parts)))
    rename = {}
    pool = iter(_var_names(taken))
    for v in lt.variables:
        rename[v] = next(pool)
    body = _concat(rename.get(lf.label, lf.label) if lf.is_variable else lf.label
                   for lf in lt.leaves())
    try:
        inner = parse_term(body)
    except TermSyntaxError as exc:
        raise UnparsableTemplate(f"{body!r}: {exc}") from exc
    return _bind(inner, [rename[v] for v in lt.variables])


def _var_names(taken):
    for base in ("x", "y", "z", "w", "u"):
        if base not in taken:
            yield base
    i = 1
    while True:
        if f"v{i}" not in taken:
            yield f"v{i}"
        i += 1


def _bind(body: Term, names: list[str]) -> Term:
    # parse_term made the spliced names constants; turn them into bound variables
    from .terms import Const, Var, replace
    if not names:
        return body
    body = replace(body, [Const(n) for n in names], [Var(n) for n in names])
    return lambdas(names, body)


# --------------------------------------------------------------------------
# lowest dominating nonterminal

def _sites(tree: DerivationTree, x) -> list[tuple[int, ...]]:
    out = []
    for item in x:
        if isinstance(item, tuple):
            tree.at(item)  # raises IndexError for a bad address
            out.append(item)
        else:
            found = [p for p in tree.paths() if tree.at(p).label == item]
            if not found:
                raise NotDominated(f"{item!r} does not occur in the tree")
            out.extend(found)
    return out


def mcyk(x, tree: DerivationTree, g: Grammar | None = None) -> tuple[int, ...]:
    """Address of the lowest node properly dominating every site in ``x``.

    ``x`` mixes node addresses and symbols (a symbol stands for all of its
    occurrences). A lone site is lifted to its parent; the root stays put.
    """
    if g is not None:
        for item in x:
            if isinstance(item, str) and item not in g.nonterminals and item not in g.terminals:
                raise NotDominated(f"{item!r} is not a grammar symbol")
    sites = _sites(tree, x)
    if not sites:
        raise NotDominated("empty symbol set")
    common = sites[0]
    for s in sites[1:]:
        k = 0
        while k < min(len(common), len(s)) and common[k] == s[k]:
            k += 1
        common = common[:k]
    if common in sites and common:
        common = common[:-1]
    return common


def yield_of(tree: DerivationTree, path: tuple[int, ...]) -> str:
    return tree.at(path).yield_text()
