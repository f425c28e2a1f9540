"""Packed CKY chart over (category, meaning) items for the log-linear PCCG.

Every lexicon entry is one feature; a derivation scores the sum of the
weights of the entries at its leaves. Items sharing a span, category and
normal-form meaning are merged. Each item keeps

* ``logz``   -- log of the summed exp-scores of the derivations it packs,
* ``best``   -- the Viterbi score, with a back-pointer to rebuild the tree,
* ``derivs`` -- its one-step derivations (child items, or the leaf entry
  and its score), for the outside pass.

Expected feature counts come from an inside-outside pass over the packed
forest, started either from every root item or from the gold item alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .ccg import (FORWARD_APP, PUNCTUATION, Atom, Category, CcgTree, combine_rule,
                  punctuation_category)
from .lexicon import Lexicon, LexiconEntry
from .terms import (App, Lam, NonTerminating, Term, Var, beta_normalize, canonical,
                    render_term)

DEFAULT_CAP = 200
MAX_TERM_SIZE = 400
IDENTITY = Lam("x", Var("x"))


def logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    m = max(a, b)
    return m + math.log(math.exp(a - m) + math.exp(b - m))


_CAT_IDS: dict[Category, int] = {}
_RULES: dict[tuple[int, int], tuple | None] = {}


def cat_id(c: Category) -> int:
    """Small integer standing for a category in chart keys."""
    i = _CAT_IDS.get(c)
    if i is None:
        i = _CAT_IDS[c] = len(_CAT_IDS)
    return i


def _rule(l: Item, r: Item, lid: int, rid: int):
    pair = (lid, rid)
    rule = _RULES.get(pair, False)
    if rule is False:
        found = combine_rule(l.category, r.category)
        rule = _RULES[pair] = None if found is None else (found[0], cat_id(found[1]), found[1])
    return rule


@lru_cache(maxsize=200_000)
def order_key(t: Term) -> str:
    """Deterministic tie-break between items of equal score."""
    return render_term(t)


@dataclass
class Item:
    category: Category
    term: Term
    logz: float = -math.inf
    best: float = -math.inf
    back: tuple = ()
    derivs: list = field(default_factory=list)

    def add_leaf(self, entry: LexiconEntry | None, score: float):
        self.derivs.append((None, entry, score))
        if score > self.best:
            self.best = score
            self.back = ("leaf", entry)


class Chart:
    def __init__(self, tokens: Sequence[str], cells: dict, root: Category):
        self.tokens = list(tokens)
        self.cells = cells
        self.root = root

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def span(self) -> tuple[int, int]:
        return (0, self.n)

    def roots(self) -> list[Item]:
        if self.n == 0:
            return []
        rid = cat_id(self.root)
        return [it for key, it in self.cells.get(self.span, {}).items() if key[0] == rid]

    def log_partition(self) -> float:
        z = -math.inf
        for it in self.roots():
            z = logaddexp(z, it.logz)
        return z

    def item_for(self, term: Term) -> Item | None:
        if not self.n:
            return None
        key = (cat_id(self.root), canonical(beta_normalize(term)))
        return self.cells.get(self.span, {}).get(key)

    def expected_features(self, items: Iterable[Item] | None = None) -> dict:
        """Feature expectations over the derivations packed in ``items`` (default: all roots)."""
        items = self.roots() if items is None else list(items)
        z = -math.inf
        for it in items:
            z = logaddexp(z, it.logz)
        if z == -math.inf:
            return {}
        outside: dict[int, float] = {id(it): 0.0 for it in items}
        out: dict = {}
        for span in sorted(self.cells, key=lambda s: (s[0] - s[1], s[0])):
            for it in self.cells[span].values():
                o = outside.get(id(it))
                if o is None:
                    continue
                for d in it.derivs:
                    if len(d) == 2:
                        left, right = d
                        lk, rk = id(left), id(right)
                        outside[lk] = logaddexp(outside.get(lk, -math.inf), o + right.logz)
                        outside[rk] = logaddexp(outside.get(rk, -math.inf), o + left.logz)
                    elif d[1] is not None:
                        entry = d[1]
                        out[entry.key] = out.get(entry.key, 0.0) + math.exp(o + d[2] - z)
        return out

    def best_root(self) -> Item | None:
        roots = self.roots()
        if not roots:
            return None
        return min(roots, key=lambda it: (-it.best, order_key(it.term)))

    def ranked_roots(self) -> list[Item]:
        return sorted(self.roots(), key=lambda it: (-it.best, order_key(it.term)))

    def derivation(self, item: Item) -> tuple[CcgTree, list[LexiconEntry | None]]:
        """Viterbi derivation of a root item."""
        return self.tree(self.span, (cat_id(item.category), item.term))

    def tree(self, span, key) -> tuple[CcgTree, list[LexiconEntry | None]]:
        """Viterbi derivation of an item, with the entry used at each leaf."""
        it = self.cells[span][key]
        if it.back[0] == "leaf":
            i, j = span
            word = " ".join(self.tokens[i:j])
            return CcgTree(it.category, word=word), [it.back[1]]
        _, rule, lspan, lkey, rspan, rkey = it.back
        lt, le = self.tree(lspan, lkey)
        rt, re_ = self.tree(rspan, rkey)
        return CcgTree(it.category, left=lt, right=rt, rule=rule), le + re_


@lru_cache(maxsize=500_000)
def compose(fn: Term, arg: Term, step_limit: int = 10_000) -> Term | None:
    """Normal form of ``fn @ arg``, or None when it cannot be a meaning.

    Only abstractions may be applied: a closed normal term that is not an
    abstraction is a saturated constant application, and applying it again
    is a type error.
    """
    if not isinstance(fn, Lam):
        return None
    try:
        t = beta_normalize(App(fn, arg), step_limit)
    except NonTerminating:
        return None
    if t.size > MAX_TERM_SIZE:
        return None
    return canonical(t)


def _logsumexp(xs: list[float]) -> float:
    m = max(xs)
    if m == -math.inf:
        return m
    return m + math.log(sum(math.exp(x - m) for x in xs))


def _finish(cell: dict):
    for it in cell.values():
        it.logz = _logsumexp([d[2] if len(d) == 3 else d[0].logz + d[1].logz for d in it.derivs])


def _prune(cell: dict, cap: int) -> dict:
    # the cap applies per category, so one crowded category cannot starve another
    groups: dict = {}
    for key, it in cell.items():
        groups.setdefault(key[0], []).append((key, it))
    out = {}
    for members in groups.values():
        if len(members) > cap:
            members.sort(key=lambda kv: (-kv[1].best, order_key(kv[0][1])))
        out.update(members[:cap])
    return out


def _by_category(cell: dict) -> list:
    groups: dict = {}
    for key, it in cell.items():
        groups.setdefault(key[0], []).append((key, it))
    return list(groups.items())


def build_chart(tokens: Sequence[str], lexicon: Lexicon, theta: Mapping | None = None,
                cap: int = DEFAULT_CAP, root: Category = Atom("S"),
                step_limit: int = 10_000) -> Chart:
    """Fill the packed chart.

    Per category, a cell keeps its ``cap`` best items by Viterbi score; the
    cells covering the whole sentence (up to punctuation) are never pruned.
    """
    theta = theta if theta is not None else {}
    n = len(tokens)
    cells: dict[tuple[int, int], dict] = {}
    maxlen = max(1, lexicon.max_phrase_length())
    for i in range(n):
        for j in range(i + 1, min(n, i + maxlen) + 1):
            phrase = " ".join(tokens[i:j])
            for e in lexicon.entries_for(phrase):
                w = theta.get(e.key, e.weight)
                key = (cat_id(e.category), e.semantics)
                cell = cells.setdefault((i, j), {})
                it = cell.get(key)
                if it is None:
                    it = cell[key] = Item(e.category, e.semantics)
                it.add_leaf(e, w)
        if tokens[i] in PUNCTUATION and not cells.get((i, i + 1)):
            cat = punctuation_category()
            it = Item(cat, IDENTITY)
            it.add_leaf(None, 0.0)
            cells[(i, i + 1)] = {(cat_id(cat), IDENTITY): it}
    groups = {}
    for span, cell in cells.items():
        _finish(cell)
        groups[span] = _by_category(cell)
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = cells.setdefault((i, j), {})
            for k in range(i + 1, j):
                left, right = groups.get((i, k)), groups.get((k, j))
                if not left or not right:
                    continue
                for lc, litems in left:
                    for rc, ritems in right:
                        rule = _RULES.get((lc, rc), False)
                        if rule is False:
                            rule = _rule(litems[0][1], ritems[0][1], lc, rc)
                        if rule is None:
                            continue
                        forward = rule[0] == FORWARD_APP
                        for lkey, l in litems:
                            for rkey, r in ritems:
                                if forward:
                                    term = compose(l.term, r.term, step_limit)
                                else:
                                    term = compose(r.term, l.term, step_limit)
                                if term is None:
                                    continue
                                key = (rule[1], term)
                                it = cell.get(key)
                                if it is None:
                                    it = cell[key] = Item(rule[2], term)
                                it.derivs.append((l, r))
                                score = l.best + r.best
                                if score > it.best:
                                    it.best = score
                                    it.back = ("node", rule[0], (i, k), lkey, (k, j), rkey)
            # spans that only wait for punctuation feed nothing else; keep them whole
            final = all(t in PUNCTUATION for t in tokens[:i]) and all(t in PUNCTUATION for t in tokens[j:])
            if len(cell) > cap and not final:
                cell = cells[(i, j)] = _prune(cell, cap)
            _finish(cell)
            groups[(i, j)] = _by_category(cell)
    return Chart(tokens, cells, root)
