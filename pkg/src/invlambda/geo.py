"""A toy geography database and a set-semantics interpreter for funql."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .terms import App, Const, Term, parse_term, spine


class UnsupportedPredicate(ValueError):
    """The term uses a head the interpreter does not know, or is not ground."""


@dataclass(frozen=True)
class GeoDatabase:
    states: dict[str, tuple[int, str]]          # name -> (population, country)
    rivers: dict[str, tuple[str, ...]]          # name -> states traversed
    cities: dict[str, str]                      # name -> state
    lakes: dict[str, str]                       # name -> state
    places: dict[str, int]                      # name -> elevation (m)
    borders: frozenset = field(default_factory=frozenset)  # unordered state pairs

    def __post_init__(self):
        for r, through in self.rivers.items():
            if not through or any(s not in self.states for s in through):
                raise ValueError(f"river {r!r} must traverse known states")
        for table in (self.cities, self.lakes):
            for name, s in table.items():
                if s not in self.states:
                    raise ValueError(f"{name!r} lies in unknown state {s!r}")
        for pair in self.borders:
            if len(pair) != 2 or any(s not in self.states for s in pair):
                raise ValueError(f"bad border {sorted(pair)}")

    @property
    def countries(self) -> set[str]:
        return {c for _, c in self.states.values()}

    def neighbours(self, state: str) -> set[str]:
        out = set()
        for pair in self.borders:
            if state in pair:
                out |= pair - {state}
        return out


def _borders(*pairs) -> frozenset:
    return frozenset(frozenset(p) for p in pairs)


def toy_database() -> GeoDatabase:
    return GeoDatabase(
        states={
            "alabama": (4_903_000, "usa"), "arkansas": (3_018_000, "usa"),
            "kansas": (2_913_000, "usa"), "mississippi": (2_976_000, "usa"),
            "new york": (19_450_000, "usa"), "ohio": (11_690_000, "usa"),
            "oregon": (4_218_000, "usa"), "texas": (28_990_000, "usa"),
            "utah": (3_206_000, "usa"), "virginia": (8_536_000, "usa"),
        },
        rivers={
            "mississippi": ("arkansas", "mississippi"), "red": ("texas", "arkansas"),
            "colorado": ("utah", "texas"), "arkansas": ("kansas", "arkansas"),
            "ohio": ("ohio",), "tennessee": ("alabama", "mississippi"),
            "columbia": ("oregon",), "potomac": ("virginia",), "hudson": ("new york",),
        },
        cities={
            "birmingham": "alabama", "little rock": "arkansas", "wichita": "kansas",
            "jackson": "mississippi", "albany": "new york", "columbus": "ohio",
            "portland": "oregon", "houston": "texas", "dallas": "texas",
            "salt lake city": "utah", "richmond": "virginia",
        },
        lakes={"great salt lake": "utah", "crater lake": "oregon", "lake erie": "ohio",
               "lake travis": "texas"},
        places={"mount mckinley": 6190, "mount whitney": 4421, "pikes peak": 4302},
        borders=_borders(("alabama", "mississippi"), ("arkansas", "mississippi"),
                         ("arkansas", "texas")),
    )


def _name(t: Term) -> str:
    if not isinstance(t, Const):
        raise UnsupportedPredicate(f"expected a name, got {t}")
    return t.name.strip("'\"")


class _Interpreter:
    def __init__(self, db: GeoDatabase):
        self.db = db
        self.unary: dict[str, Callable[[frozenset], frozenset]] = {
            "answer": lambda xs: xs,
            "river": lambda xs: self._kind(xs, "river"),
            "lake": lambda xs: self._kind(xs, "lake"),
            "city": lambda xs: self._kind(xs, "city"),
            "state": lambda xs: self._kind(xs, "state"),
            "loc_2": self._loc,
            "next_to_2": self._next_to,
            "population_1": self._population,
            "elevation_1": self._elevation,
        }
        self.ids = {"stateid": ("state", db.states), "riverid": ("river", db.rivers),
                    "cityid": ("city", db.cities), "placeid": ("place", db.places),
                    "countryid": ("country", {c: None for c in db.countries})}

    def everything(self) -> frozenset:
        db = self.db
        return frozenset([("state", s) for s in db.states] + [("river", r) for r in db.rivers]
                         + [("city", c) for c in db.cities] + [("lake", l) for l in db.lakes]
                         + [("place", p) for p in db.places]
                         + [("country", c) for c in db.countries])

    @staticmethod
    def _kind(xs, kind):
        return frozenset(x for x in xs if x[0] == kind)

    def _loc(self, xs):
        db, out = self.db, set()
        for kind, name in xs:
            if kind == "state":
                inside = {name}
            elif kind == "country":
                inside = {s for s, (_, c) in db.states.items() if c == name}
                out |= {("state", s) for s in inside}
            else:
                continue
            out |= {("river", r) for r, through in db.rivers.items() if inside & set(through)}
            out |= {("city", c) for c, s in db.cities.items() if s in inside}
            out |= {("lake", l) for l, s in db.lakes.items() if s in inside}
        return frozenset(out)

    def _next_to(self, xs):
        return frozenset(("state", n) for kind, name in xs if kind == "state"
                         for n in self.db.neighbours(name))

    def _population(self, xs):
        return frozenset(("number", self.db.states[name][0]) for kind, name in xs
                         if kind == "state")

    def _elevation(self, xs):
        return frozenset(("number", self.db.places[name]) for kind, name in xs
                         if kind == "place")

    def run(self, t: Term) -> frozenset:
        head, args = spine(t)
        if not isinstance(head, Const) or not isinstance(t, (App, Const)):
            raise UnsupportedPredicate(f"not a ground funql term: {t}")
        name = head.name
        if name == "all" and not args:
            return self.everything()
        if name in self.ids and len(args) == 1:
            kind, table = self.ids[name]
            key = _name(args[0])
            return frozenset([(kind, key)]) if key in table else frozenset()
        if name in self.unary and len(args) == 1:
            return self.unary[name](self.run(args[0]))
        if name == "exclude" and len(args) == 2:
            return self.run(args[0]) - self.run(args[1])
        raise UnsupportedPredicate(f"unsupported predicate {name}/{len(args)}")


def eval_funql(term: Term | str, db: GeoDatabase | None = None) -> frozenset:
    """Answer set of a ground funql query: entities ``(kind, name)`` or ``("number", n)``."""
    if isinstance(term, str):
        term = parse_term(term)
    return _Interpreter(db if db is not None else toy_database()).run(term)
