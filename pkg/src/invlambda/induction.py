"""Initial lexicon induction from (sentence, logical form) pairs.

``initial_c`` assigns the common templates of pairs of derivation trees to
the top words of the sentences; ``initial_n`` climbs the derivation tree of
a logical form from the terminal that best matches a noun.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .ccg import PUNCTUATION, Atom, CcgTree, word_levels
from .lexicon import Lexicon, LexiconEntry, Provenance
from .mrl import (DerivationTree, Grammar, LambdaTree, NotDominated, UnparsableTemplate,
                  VARIABLE, common_template, mcyk, template_to_term)

NOUN_ATOMS = frozenset({"N", "NP"})


@dataclass(frozen=True)
class InductionConfig:
    maxlevel: int = 2
    accuracy: float = 0.7

    def __post_init__(self):
        if self.maxlevel < 1:
            raise ValueError("maxlevel must be at least 1")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must lie in [0, 1]")


# --------------------------------------------------------------------------
# string similarity

def _stem(tok: str) -> str:
    if len(tok) > 4 and tok.endswith("ies"):
        return tok[:-3] + "y"
    if len(tok) > 4 and tok.endswith(("ches", "shes", "sses", "xes")):
        return tok[:-2]
    if len(tok) > 3 and tok.endswith("s") and not tok.endswith("ss"):
        return tok[:-1]
    return tok


@lru_cache(maxsize=65536)
def fold(s: str) -> str:
    """Lowercase, drop quotes/punctuation/underscores, strip plural endings."""
    s = re.sub(r"[^a-z0-9 ]+", " ", s.lower())
    return " ".join(_stem(t) for t in s.split())


def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@lru_cache(maxsize=65536)
def similarity(x: str, y: str) -> float:
    fx, fy = fold(x), fold(y)
    if not fx or not fy:
        return 0.0
    return 1.0 - edit_distance(fx, fy) / max(len(fx), len(fy))


def nmatch(w: str, terminals: Iterable[str], a: float = 0.7) -> set[str]:
    """Terminals whose similarity to ``w`` reaches ``a``."""
    return {t for t in terminals if similarity(w, t) >= a}


def match_sites(w: str, tree: DerivationTree, a: float = 0.7) -> list[tuple[int, ...]]:
    """Leaf addresses of ``tree`` whose terminal matches ``w``."""
    return [p for p in tree.leaf_paths()
            if tree.at(p).is_terminal and similarity(w, tree.at(p).label) >= a]


# --------------------------------------------------------------------------
# nouns and top words

def find_nouns(tree: CcgTree) -> list[str]:
    out = []
    for lf in tree.leaves():
        if lf.word in PUNCTUATION:
            continue
        if (isinstance(lf.category, Atom) and lf.category.name in NOUN_ATOMS) or " " in lf.word:
            if lf.word not in out:
                out.append(lf.word)
    return out


def top_leaves(tree: CcgTree) -> list[CcgTree]:
    levels = word_levels(tree)
    if not levels:
        return []
    best = min(levels.values())
    seen, out = set(), []
    for lf in tree.leaves():
        if levels.get(lf.word) == best and (lf.word, lf.category) not in seen:
            seen.add((lf.word, lf.category))
            out.append(lf)
    return out


def sentence_words(tree: CcgTree) -> list[str]:
    return [lf.word for lf in tree.leaves() if lf.word not in PUNCTUATION]


def _check_lengths(corpus, parses, derivations):
    if not (len(corpus) == len(parses) == len(derivations)):
        raise ValueError("corpus, parses and derivations must have the same length")


# --------------------------------------------------------------------------
# INITIAL_C

def initial_c(corpus: Sequence, parses: Sequence[CcgTree],
              derivations: Sequence[DerivationTree], g: Grammar | None = None) -> Lexicon:
    """Common templates of every pair (i, j), i <= j, given to the top words of both."""
    _check_lengths(corpus, parses, derivations)
    tops = [top_leaves(p) for p in parses]
    found: dict[tuple, LexiconEntry] = {}
    terms: dict = {}
    for i in range(len(derivations)):
        for j in range(i, len(derivations)):
            lt = common_template(derivations[i], derivations[j])
            if lt is None or lt.is_trivial:
                continue
            key = _template_key(lt)
            if key not in terms:
                try:
                    terms[key] = template_to_term(lt)
                except UnparsableTemplate:
                    terms[key] = None
            term = terms[key]
            if term is None:
                continue
            for lf in tops[i] + tops[j]:
                e = LexiconEntry(lf.word, lf.category, term, provenance=Provenance.INITIAL_C)
                found.setdefault(e.key, e)
    return Lexicon(found[k] for k in sorted(found))


def _template_key(lt: LambdaTree):
    return tuple((lf.kind, lf.label if lf.kind != VARIABLE else "") for lf in lt.leaves())


# --------------------------------------------------------------------------
# INITIAL_N

def _candidate(tree: DerivationTree, node_path, site, w: str, others: list[str], a: float):
    """Template for the subtree at ``node_path``; leaves matching other words
    below an intermediate nonterminal become variables."""
    node = tree.at(node_path)
    names = []

    def go(n: DerivationTree, rel: tuple[int, ...]) -> DerivationTree:
        if not n.children:
            if (n.is_terminal and node_path + rel != site and len(rel) >= 2
                    and any(similarity(o, n.label) >= a for o in others)):
                name = f"v{len(names) + 1}"
                names.append(name)
                return DerivationTree(name, (), VARIABLE)
            return n
        return DerivationTree(n.label, tuple(go(c, rel + (i,)) for i, c in enumerate(n.children)),
                              n.kind)

    shape = go(node, ())
    return template_to_term(LambdaTree(tuple(names), shape))


def _sibling_match(node: DerivationTree, skip: tuple[int, ...] | None, others, a) -> bool:
    for i, c in enumerate(node.children):
        if skip is not None and skip == (i,):
            continue
        if c.is_terminal and any(similarity(o, c.label) >= a for o in others):
            return True
    return False


def noun_candidates(w: str, sentence: Sequence[str], tree: DerivationTree,
                    cfg: InductionConfig = InductionConfig(), g: Grammar | None = None) -> list:
    """Candidate meanings of noun ``w``: one upward walk per matching terminal."""
    others = [o for o in sentence if o.lower() != w.lower()]
    out = []
    for site in match_sites(w, tree, cfg.accuracy):
        path = mcyk([site], tree, g)
        below = site[len(path):]
        for gen in range(cfg.maxlevel + 1):
            node = tree.at(path)
            skip = below[:1] if below else None
            if _sibling_match(node, skip, others, cfg.accuracy):
                break
            try:
                term = _candidate(tree, path, site, w, others, cfg.accuracy)
            except UnparsableTemplate:
                term = None
            if term is not None and term not in out:
                out.append(term)
            if sum(1 for c in node.children if not c.is_terminal) >= 2 or not path:
                break
            below = path[-1:]
            path = path[:-1]
    return out


def initial_n(corpus: Sequence, parses: Sequence[CcgTree],
              derivations: Sequence[DerivationTree], g: Grammar | None = None,
              cfg: InductionConfig = InductionConfig()) -> Lexicon:
    _check_lengths(corpus, parses, derivations)
    found: dict[tuple, LexiconEntry] = {}
    for parse, deriv in zip(parses, derivations):
        words = sentence_words(parse)
        cats = {lf.word: lf.category for lf in parse.leaves()}
        for w in find_nouns(parse):
            for term in noun_candidates(w, words, deriv, cfg, g):
                e = LexiconEntry(w, cats[w], term, provenance=Provenance.INITIAL_N)
                found.setdefault(e.key, e)
    return Lexicon(found[k] for k in sorted(found))


def induce(corpus: Sequence, parses: Sequence[CcgTree], derivations: Sequence[DerivationTree],
           g: Grammar | None = None, cfg: InductionConfig = InductionConfig()) -> Lexicon:
    """INITIAL_C followed by INITIAL_N; the first provenance of a duplicate wins."""
    lex = initial_c(corpus, parses, derivations, g)
    lex.update(initial_n(corpus, parses, derivations, g, cfg))
    return lex


__all__ = ["InductionConfig", "fold", "similarity", "nmatch", "match_sites", "find_nouns",
           "top_leaves", "initial_c", "initial_n", "noun_candidates", "induce", "NotDominated"]
