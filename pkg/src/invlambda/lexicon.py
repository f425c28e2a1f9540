"""Lexicon entries (phrase, category, meaning, weight) and their TSV form."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace as dc_replace
from typing import Iterable, Iterator

from .ccg import Category, parse_category
from .terms import Term, canonical, is_closed, parse_term, render_term

INITIAL_WEIGHT = 0.1

HEADER = "phrase\tcategory\tterm\tweight\tprovenance"


class Provenance(str, enum.Enum):
    INITIAL_C = "initial_c"
    INITIAL_N = "initial_n"
    INVERSE = "inverse"
    GENERALIZED = "generalized"
    TRIVIAL = "trivial"
    GIVEN = "given"


def normalize_phrase(phrase: str) -> str:
    return " ".join(phrase.lower().split())


@dataclass(frozen=True)
class LexiconEntry:
    phrase: str
    category: Category
    semantics: Term
    weight: float = INITIAL_WEIGHT
    provenance: Provenance = Provenance.GIVEN

    def __post_init__(self):
        object.__setattr__(self, "phrase", normalize_phrase(self.phrase))
        if not is_closed(self.semantics):
            raise ValueError(f"open lexicon term for {self.phrase!r}: {render_term(self.semantics)}")
        if not math.isfinite(self.weight):
            raise ValueError(f"non-finite weight for {self.phrase!r}")
        object.__setattr__(self, "semantics", canonical(self.semantics))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        object.__setattr__(self, "_key",
                           (self.phrase, str(self.category), render_term(self.semantics)))

    @property
    def key(self) -> tuple[str, str, str]:
        return self._key

    def with_weight(self, weight: float) -> "LexiconEntry":
        return dc_replace(self, weight=weight)

    def to_row(self) -> str:
        return "\t".join([*self.key, repr(float(self.weight)), self.provenance.value])


def entry(phrase: str, category: str | Category, term: str | Term,
          weight: float = INITIAL_WEIGHT, provenance=Provenance.GIVEN) -> LexiconEntry:
    if isinstance(category, str):
        category = parse_category(category)
    if isinstance(term, str):
        term = parse_term(term)
    return LexiconEntry(phrase, category, term, weight, provenance)


class Lexicon:
    """Insertion-ordered set of entries, unique on (phrase, category, term)."""

    def __init__(self, entries: Iterable[LexiconEntry] = ()):
        self._entries: dict[tuple, LexiconEntry] = {}
        self._by_phrase: dict[str, list[LexiconEntry]] = {}
        for e in entries:
            self.add(e)

    def add(self, e: LexiconEntry) -> bool:
        if e.key in self._entries:
            return False
        self._entries[e.key] = e
        self._by_phrase.setdefault(e.phrase, []).append(e)
        return True

    def update(self, entries: Iterable[LexiconEntry]) -> list[LexiconEntry]:
        return [e for e in entries if self.add(e)]

    def __iter__(self) -> Iterator[LexiconEntry]:
        return iter(self._entries.values())

    def __len__(self):
        return len(self._entries)

    def __contains__(self, item) -> bool:
        key = item.key if isinstance(item, LexiconEntry) else item
        return key in self._entries

    def __eq__(self, other):
        return isinstance(other, Lexicon) and set(self._entries) == set(other._entries)

    def get(self, key) -> LexiconEntry | None:
        return self._entries.get(key)

    def keys(self):
        return list(self._entries)

    def phrases(self) -> set[str]:
        return set(self._by_phrase)

    def max_phrase_length(self) -> int:
        return max((len(p.split()) for p in self._by_phrase), default=1)

    def entries_for(self, phrase: str, category: Category | None = None) -> list[LexiconEntry]:
        found = self._by_phrase.get(normalize_phrase(phrase), [])
        if category is None:
            return list(found)
        return [e for e in found if e.category == category]

    def has(self, phrase: str, category: Category) -> bool:
        return bool(self.entries_for(phrase, category))

    def categories(self) -> set[Category]:
        return {e.category for e in self}

    def copy(self) -> "Lexicon":
        return Lexicon(self)

    def sorted(self) -> list[LexiconEntry]:
        return sorted(self, key=lambda e: e.key)


def dump_lexicon(lex: Iterable[LexiconEntry], header: str = HEADER) -> str:
    rows = [header] + [e.to_row() for e in sorted(lex, key=lambda e: e.key)]
    return "\n".join(rows) + "\n"


def load_lexicon(text: str) -> Lexicon:
    """Read lexicon TSV; a first line starting with ``phrase`` or ``#`` is a header."""
    lex = Lexicon()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#") or (lineno == 1 and line.startswith("phrase\t")):
            continue
        cols = line.split("\t")
        if len(cols) < 3:
            raise ValueError(f"line {lineno}: expected phrase, category, term[, weight, provenance]")
        weight = float(cols[3]) if len(cols) > 3 and cols[3] else INITIAL_WEIGHT
        prov = cols[4] if len(cols) > 4 and cols[4] else Provenance.GIVEN
        lex.add(entry(cols[0], cols[1], cols[2], weight, prov))
    return lex
