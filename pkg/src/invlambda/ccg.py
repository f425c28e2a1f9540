"""Application-only combinatory categorial grammar.

Categories, a CKY parser over a word -> categories lexicon, a reader/writer
for bracketed derivations, word levels / top words, and semantic composition
of lexical meanings along a parse tree.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .terms import App, Term, beta_normalize, parse_term

FORWARD = "/"
BACKWARD = "\\"
FORWARD_APP = "fa"
BACKWARD_APP = "ba"
PUNCTUATION = frozenset({".", "?", "!"})
MAX_TREES_PER_CELL = 200


class NoParse(ValueError):
    pass


class FormatError(ValueError):
    pass


class RuleViolation(ValueError):
    pass


class MissingEntry(KeyError):
    def __init__(self, word, category):
        super().__init__(f"no lexicon entry for {word!r} with category {category}")
        self.word = word
        self.category = category


# --------------------------------------------------------------------------
# categories

def _cached_hash(obj, fields) -> int:
    h = obj.__dict__.get("_hash")
    if h is None:
        h = hash(fields)
        object.__setattr__(obj, "_hash", h)
    return h


@dataclass(frozen=True)
class Atom:
    name: str

    def __hash__(self):
        return _cached_hash(self, ("Atom", self.name))

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Slash:
    result: "Category"
    direction: str
    argument: "Category"

    def __hash__(self):
        return _cached_hash(self, ("Slash", self.result, self.direction, self.argument))

    def __str__(self):
        return f"{_sub(self.result)}{self.direction}{_sub(self.argument)}"


Category = Atom | Slash


def _sub(c: Category) -> str:
    return f"({c})" if isinstance(c, Slash) else str(c)


_CAT_TOKEN = re.compile(r"\s*([A-Za-z][A-Za-z0-9\[\]=_]*|[()/\\])")


def parse_category(text: str) -> Category:
    """Parse ``(NP\\N)/N``; slashes associate to the left."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _CAT_TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"bad category {text!r}")
        toks.append(m.group(1))
        pos = m.end()
    i = 0

    def primary():
        nonlocal i
        if i >= len(toks):
            raise FormatError(f"truncated category {text!r}")
        tok = toks[i]
        i += 1
        if tok == "(":
            c = slashed()
            if i >= len(toks) or toks[i] != ")":
                raise FormatError(f"unbalanced category {text!r}")
            i += 1
            return c
        if tok in ("/", "\\", ")"):
            raise FormatError(f"unexpected {tok!r} in category {text!r}")
        return Atom(tok)

    def slashed():
        nonlocal i
        c = primary()
        while i < len(toks) and toks[i] in ("/", "\\"):
            d = toks[i]
            i += 1
            c = Slash(c, d, primary())
        return c

    c = slashed()
    if i != len(toks):
        raise FormatError(f"trailing input in category {text!r}")
    return c


def combine(left: Category, right: Category) -> Category | None:
    """Result of forward or backward application, or None."""
    rule = combine_rule(left, right)
    return None if rule is None else rule[1]


def combine_rule(left: Category, right: Category) -> tuple[str, Category] | None:
    if isinstance(left, Slash) and left.direction == FORWARD and left.argument == right:
        return FORWARD_APP, left.result
    if isinstance(right, Slash) and right.direction == BACKWARD and right.argument == left:
        return BACKWARD_APP, right.result
    return None


def atom_of(c: Category) -> str | None:
    return c.name if isinstance(c, Atom) else None


# --------------------------------------------------------------------------
# trees

@dataclass(frozen=True)
class CcgTree:
    category: Category
    word: str | None = None
    left: "CcgTree | None" = None
    right: "CcgTree | None" = None
    rule: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.word is not None

    def leaves(self) -> list["CcgTree"]:
        if self.is_leaf:
            return [self]
        return self.left.leaves() + self.right.leaves()

    @property
    def words(self) -> list[str]:
        return [leaf.word for leaf in self.leaves()]

    @property
    def phrase(self) -> str:
        return " ".join(self.words)

    def function_child(self) -> "CcgTree":
        return self.left if self.rule == FORWARD_APP else self.right

    def argument_child(self) -> "CcgTree":
        return self.right if self.rule == FORWARD_APP else self.left

    def nodes(self) -> Iterator["CcgTree"]:
        yield self
        if not self.is_leaf:
            yield from self.left.nodes()
            yield from self.right.nodes()

    def __str__(self):
        return dump_derivation(self)


def leaf(category: Category | str, word: str) -> CcgTree:
    if isinstance(category, str):
        category = parse_category(category)
    return CcgTree(category, word=word)


def node(left: CcgTree, right: CcgTree) -> CcgTree:
    rule = combine_rule(left.category, right.category)
    if rule is None:
        raise RuleViolation(f"{left.category} + {right.category} does not combine")
    return CcgTree(rule[1], left=left, right=right, rule=rule[0])


def validate(tree: CcgTree) -> None:
    """Re-check the category arithmetic of every internal node."""
    for n in tree.nodes():
        if n.is_leaf:
            continue
        rule = combine_rule(n.left.category, n.right.category)
        if rule is None or rule[1] != n.category or rule[0] != n.rule:
            raise RuleViolation(
                f"{n.left.category} + {n.right.category} -> {n.category} ({n.rule}) is invalid")


# --------------------------------------------------------------------------
# category lexicon and tokenization

def load_catlex(text: str) -> dict[str, list[Category]]:
    """Read ``word<TAB>cat[,cat...]`` lines; words are case-folded."""
    out: dict[str, list[Category]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise FormatError(f"line {lineno}: expected word<TAB>categories")
        word, cats = line.split("\t", 1)
        bucket = out.setdefault(word.strip().lower(), [])
        for c in _split_categories(cats):
            cat = parse_category(c)
            if cat not in bucket:
                bucket.append(cat)
    return out


def _split_categories(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text.strip():
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def dump_catlex(catlex: Mapping[str, Iterable[Category]]) -> str:
    return "".join(f"{w}\t{','.join(str(c) for c in cats)}\n" for w, cats in sorted(catlex.items()))


def tokenize(sentence: str, compounds: Iterable[str] = ()) -> list[str]:
    """Split off final punctuation and join known multiword nouns into one token."""
    raw = re.findall(r"[^\s.?!,]+|[.?!,]", sentence)
    chunks = sorted({tuple(c.lower().split()) for c in compounds if c.strip()},
                     key=len, reverse=True)
    out = []
    i = 0
    while i < len(raw):
        for chunk in chunks:
            n = len(chunk)
            if n > 1 and tuple(w.lower() for w in raw[i:i + n]) == chunk:
                out.append(" ".join(raw[i:i + n]))
                i += n
                break
        else:
            out.append(raw[i])
            i += 1
    return out


def categories_for(word: str, catlex: Mapping[str, list[Category]]) -> list[Category]:
    cats = catlex.get(word.lower())
    if cats:
        return cats
    if word in PUNCTUATION:
        return [punctuation_category()]
    return []


def punctuation_category() -> Category:
    return Slash(Atom("S"), BACKWARD, Atom("S"))


# --------------------------------------------------------------------------
# CKY

def cky_parse(tokens: list[str], catlex: Mapping[str, list[Category]],
              root: Category = Atom("S")) -> list[CcgTree]:
    """All application-only parses of ``tokens`` rooted at ``root``."""
    n = len(tokens)
    if n == 0:
        raise NoParse("empty sentence")
    chart: dict[tuple[int, int], dict[Category, list[CcgTree]]] = {}
    for i, w in enumerate(tokens):
        cats = categories_for(w, catlex)
        if not cats:
            raise NoParse(f"no category for {w!r}")
        chart[i, i + 1] = {c: [CcgTree(c, word=w)] for c in sorted(set(cats), key=str)}
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell: dict[Category, list[CcgTree]] = {}
            for k in range(i + 1, j):
                for lc, ltrees in chart[i, k].items():
                    for rc, rtrees in chart[k, j].items():
                        rule = combine_rule(lc, rc)
                        if rule is None:
                            continue
                        bucket = cell.setdefault(rule[1], [])
                        for lt, rt in itertools.product(ltrees, rtrees):
                            if len(bucket) >= MAX_TREES_PER_CELL:
                                break
                            bucket.append(CcgTree(rule[1], left=lt, right=rt, rule=rule[0]))
            chart[i, j] = cell
    trees = chart[0, n].get(root, [])
    if not trees:
        raise NoParse(f"no {root} parse for {' '.join(tokens)!r}")
    return sorted(set(trees), key=dump_derivation)


# --------------------------------------------------------------------------
# derivation files: (fa CAT (child) (child)) / (lex CAT word)

def dump_derivation(tree: CcgTree) -> str:
    if tree.is_leaf:
        return f"(lex {tree.category} {tree.word})"
    return f"({tree.rule} {tree.category} {dump_derivation(tree.left)} {dump_derivation(tree.right)})"


_RULE_NAMES = {"fa": FORWARD_APP, ">": FORWARD_APP, "ba": BACKWARD_APP, "<": BACKWARD_APP}


def load_derivation(text: str) -> CcgTree:
    """Parse a bracketed derivation and validate its category arithmetic."""
    reader = _SexpReader(text)
    tree = reader.tree()
    reader.skip_ws()
    if reader.pos != len(text):
        raise FormatError(f"trailing input at position {reader.pos}")
    validate(tree)
    return tree


class _SexpReader:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise FormatError(f"expected {ch!r} at position {self.pos}")
        self.pos += 1

    def atom(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and not self.text[self.pos].isspace() \
                and self.text[self.pos] not in "()":
            self.pos += 1
        if start == self.pos:
            raise FormatError(f"expected a symbol at position {start}")
        return self.text[start:self.pos]

    def category(self) -> Category:
        # a category token may contain balanced parentheses: (NP\N)/N
        self.skip_ws()
        start, depth = self.pos, 0
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    break
                depth -= 1
            elif ch.isspace() and depth == 0:
                break
            self.pos += 1
        return parse_category(self.text[start:self.pos])

    def tree(self) -> CcgTree:
        self.expect("(")
        tag = self.atom()
        cat = self.category()
        if tag == "lex":
            self.skip_ws()
            start = self.pos
            depth = 0
            while self.pos < len(self.text):
                ch = self.text[self.pos]
                if ch == ")" and depth == 0:
                    break
                depth += (ch == "(") - (ch == ")")
                self.pos += 1
            word = " ".join(self.text[start:self.pos].split())
            if not word:
                raise FormatError(f"empty word at position {start}")
            self.expect(")")
            return CcgTree(cat, word=word)
        if tag not in _RULE_NAMES:
            raise FormatError(f"unknown rule {tag!r}")
        left = self.tree()
        right = self.tree()
        self.expect(")")
        return CcgTree(cat, left=left, right=right, rule=_RULE_NAMES[tag])


# --------------------------------------------------------------------------
# levels and top words

def _strip_punctuation(tree: CcgTree) -> CcgTree | None:
    if tree.is_leaf:
        return None if tree.word in PUNCTUATION else tree
    left = _strip_punctuation(tree.left)
    right = _strip_punctuation(tree.right)
    if left is None:
        return right
    if right is None:
        return left
    return tree if (left is tree.left and right is tree.right) else \
        CcgTree(tree.category, left=left, right=right, rule=tree.rule)


def word_levels(tree: CcgTree) -> dict[str, int]:
    """Root-to-leaf edge count per word (punctuation leaves are ignored).

    A word occurring more than once keeps its smallest level.
    """
    stripped = _strip_punctuation(tree)
    levels: dict[str, int] = {}
    if stripped is None:
        return levels
    stack = [(stripped, 0)]
    while stack:
        n, d = stack.pop()
        if n.is_leaf:
            levels[n.word] = min(d, levels.get(n.word, d))
        else:
            stack.append((n.right, d + 1))
            stack.append((n.left, d + 1))
    return levels


def top_words(tree: CcgTree) -> set[str]:
    levels = word_levels(tree)
    if not levels:
        return set()
    best = min(levels.values())
    return {w for w, d in levels.items() if d == best}


# --------------------------------------------------------------------------
# semantic composition

@dataclass(frozen=True)
class Composition:
    term: Term
    entries: tuple          # lexicon entry chosen for each leaf, left to right
    node_terms: tuple       # (phrase, category, term) for every node, pre-order


def compose_semantics(tree: CcgTree, lexicon, step_limit: int = 10_000) -> list[Composition]:
    """Root meaning for every choice of leaf entries.

    ``lexicon`` needs ``entries_for(word, category)``. At each internal node the
    function child's meaning is applied to the argument child's meaning.
    """
    leaves = tree.leaves()
    choices = []
    for lf in leaves:
        options = list(lexicon.entries_for(lf.word, lf.category))
        if not options:
            raise MissingEntry(lf.word, lf.category)
        choices.append(options)
    out = []
    for combo in itertools.product(*choices):
        it = iter(combo)
        trace: list = []

        def go(n: CcgTree) -> Term:
            if n.is_leaf:
                t = beta_normalize(next(it).semantics, step_limit)
                trace.append((n.phrase, n.category, t))
                return t
            slot = len(trace)
            trace.append(None)
            lt, rt = go(n.left), go(n.right)
            fn, arg = (lt, rt) if n.rule == FORWARD_APP else (rt, lt)
            t = beta_normalize(App(fn, arg), step_limit)
            trace[slot] = (n.phrase, n.category, t)
            return t

        root = go(tree)
        out.append(Composition(root, tuple(combo), tuple(trace)))
    return out
