"""Scoring returned meanings against gold ones, and seeded k-fold splits."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .geo import GeoDatabase, UnsupportedPredicate, eval_funql, toy_database
from .terms import (Const, Lam, NonTerminating, Term, beta_normalize, canonical, parse_term,
                    render_term, spine)

GEO_COMMUTATIVE = frozenset()
CLANG_COMMUTATIVE = frozenset({"and", "or"})
CLANG_ALIASES = {"definec": "define", "definer": "define"}


class BadK(ValueError):
    """k must satisfy 2 <= k <= len(corpus)."""


def _shape(t: Term, commutative: frozenset, aliases: dict):
    """Hashable structure of a normal term with unordered arguments at commutative heads."""
    if isinstance(t, Lam):
        return ("lam", _shape(t.body, commutative, aliases))
    head, args = spine(t)
    if isinstance(head, Const) and head.name == "()" and args and isinstance(args[0], Const):
        head, args = args[0], args[1:]
    if isinstance(head, Const):
        name = aliases.get(head.name, head.name)
    else:
        name = _shape(head, commutative, aliases) if args else repr(head)
    parts = [_shape(a, commutative, aliases) for a in args]
    if name in commutative:
        parts.sort(key=repr)
    return (name, tuple(parts))


def equivalent_sr(a: Term | str, b: Term | str, commutative: Iterable[str] = GEO_COMMUTATIVE,
                  clang_i: bool = False) -> bool:
    """Exact match up to argument order under commutative heads.

    With ``clang_i`` the ``definec`` and ``definer`` heads count as equal.
    """
    a = parse_term(a) if isinstance(a, str) else a
    b = parse_term(b) if isinstance(b, str) else b
    try:
        a, b = canonical(beta_normalize(a)), canonical(beta_normalize(b))
    except NonTerminating:
        return False
    comm = frozenset(commutative)
    aliases = CLANG_ALIASES if clang_i else {}
    return _shape(a, comm, aliases) == _shape(b, comm, aliases)


@dataclass(frozen=True)
class Verdict:
    gold: str
    returned: str | None
    correct: bool


@dataclass
class EvalReport:
    total: int = 0
    returned: int = 0
    correct: int = 0
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def precision(self) -> float:
        return self.correct / self.returned if self.returned else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def merge(self, other: "EvalReport") -> "EvalReport":
        return EvalReport(self.total + other.total, self.returned + other.returned,
                          self.correct + other.correct, self.verdicts + other.verdicts)


def _answers(t, db):
    try:
        return eval_funql(t, db)
    except (UnsupportedPredicate, NonTerminating):
        return None


def is_correct(gold: Term | str, returned: Term | str, mode: str = "execute",
               db: GeoDatabase | None = None, commutative: Iterable[str] = GEO_COMMUTATIVE,
               clang_i: bool = False) -> bool:
    if mode == "execute":
        db = db if db is not None else toy_database()
        want = _answers(gold, db)
        if want is None:
            raise UnsupportedPredicate(f"gold query cannot be executed: {gold}")
        return _answers(returned, db) == want
    if mode == "match":
        return equivalent_sr(gold, returned, commutative, clang_i)
    raise ValueError(f"unknown mode {mode!r}")


def _text(t) -> str:
    return t if isinstance(t, str) else render_term(t)


def score(results: Sequence[tuple], mode: str = "execute", db: GeoDatabase | None = None,
          commutative: Iterable[str] = GEO_COMMUTATIVE, clang_i: bool = False) -> EvalReport:
    """Score ``(gold, returned-or-None)`` pairs.

    Precision is correct over returned, recall correct over total; an
    unreturned meaning only costs recall.
    """
    if mode not in ("execute", "match"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "execute" and db is None:
        db = toy_database()
    rep = EvalReport(total=len(results))
    for gold, got in results:
        ok = got is not None and is_correct(gold, got, mode, db, commutative, clang_i)
        rep.returned += got is not None
        rep.correct += ok
        rep.verdicts.append(Verdict(_text(gold), None if got is None else _text(got), ok))
    return rep


def kfold(corpus: Sequence, k: int, seed: int) -> list[tuple[list, list]]:
    """Seeded partition into k near-equal folds, as ``(train, test)`` pairs in fold order."""
    n = len(corpus)
    if not 2 <= k <= n:
        raise BadK(f"need 2 <= k <= {n}, got k={k}")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    folds = [sorted(order[f::k]) for f in range(k)]
    out = []
    for test_idx in folds:
        held = set(test_idx)
        out.append(([corpus[i] for i in range(n) if i not in held], [corpus[i] for i in test_idx]))
    return out
