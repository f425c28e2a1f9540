"""Seeded random terms over a small funql-like signature."""

import random

from invlambda.terms import App, Const, Lam, Term, Var

UNARY = ("answer", "river", "loc_2", "stateid", "state", "next_to_2", "city", "lake")
ENTITIES = ("'arkansas'", "'texas'", "'new york'", "all")


def call(name: str, *args: Term) -> Term:
    t: Term = Const(name)
    for a in args:
        t = App(t, a)
    return t


def ground(rng: random.Random, depth: int) -> Term:
    if depth <= 0 or rng.random() < 0.25:
        return Const(rng.choice(ENTITIES))
    if rng.random() < 0.15:
        return call("exclude", ground(rng, depth - 1), ground(rng, depth - 1))
    return call(rng.choice(UNARY), ground(rng, depth - 1))


def holed(rng: random.Random, depth: int, hole: Term) -> Term:
    """A ground-shaped term with ``hole`` at one or more leaves."""
    if depth <= 0 or rng.random() < 0.3:
        return hole
    if rng.random() < 0.2:
        other = holed(rng, depth - 1, hole) if rng.random() < 0.3 else ground(rng, depth - 1)
        pair = [holed(rng, depth - 1, hole), other]
        rng.shuffle(pair)
        return call("exclude", *pair)
    return call(rng.choice(UNARY), holed(rng, depth - 1, hole))


def function_pair(rng: random.Random, depth: int = 4) -> tuple[Term, Term]:
    """Closed ``(F, J)`` with ``F @ J`` well typed, in one of three shapes."""
    shape = rng.randrange(3)
    if shape == 0:
        # J an entity-like term, F abstracts its occurrences
        j = ground(rng, depth - 1)
        f = Lam("v", holed(rng, depth, Var("v")))
    elif shape == 1:
        # J a one-place function, F applies it
        j = Lam("x", holed(rng, depth - 1, Var("x")))
        f = Lam("v", holed(rng, depth - 1, App(Var("v"), ground(rng, depth - 2))))
    else:
        # F returns a function waiting for a modifier, like "in"
        j = ground(rng, depth - 1)
        f = Lam("v", Lam("y", App(Var("y"), holed(rng, depth - 1, Var("v")))))
    return f, j
