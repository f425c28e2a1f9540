"""Inverse lambda operators.

Given the meaning ``H`` of a phrase and the meaning ``G`` of one of its two
constituents, recover the meaning ``F`` of the other one:

* ``inverse_r(H, G)`` finds ``F`` with ``G @ F == H`` (unknown on the right),
* ``inverse_l(H, G)`` finds ``F`` with ``F @ G == H`` (unknown on the left).

Candidates are generated case by case and every one is checked by
recomposition before it is returned, so a non-null answer is always sound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

from .terms import (DEFAULT_STEP_LIMIT, SEXPR, App, Const, Lam, NonTerminating, Term,
                    Var, all_names, alpha_equiv, apply, beta_normalize, canonical,
                    fresh_name, is_closed, lambdas, replace, spine)

MAX_DEPTH = 3


class Direction(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class InverseProblem:
    result: Term
    known: Term
    direction: Direction


@dataclass(frozen=True)
class InverseSolution:
    term: Term | None

    def __bool__(self):
        return self.term is not None


def _candidates_by_size(h: Term) -> list[Term]:
    """Distinct subterms of ``h``, largest first, ties in pre-order."""
    seen = set()
    out = []
    for i, s in enumerate(_preorder(h)):
        if isinstance(s, Const) and s.name == SEXPR:
            continue
        head, _ = spine(s)
        if isinstance(head, Const) and head.name == SEXPR and s is not h and _partial_sexpr(s, h):
            continue
        c = canonical(s)
        if c in seen:
            continue
        seen.add(c)
        out.append((-s.size, i, s))
    out.sort(key=lambda x: (x[0], x[1]))
    return [s for _, _, s in out]


def _preorder(t):
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, App):
            stack.append(s.arg)
            stack.append(s.fn)
        elif isinstance(s, Lam):
            stack.append(s.body)


def _partial_sexpr(s: Term, root: Term) -> bool:
    # s-expression prefixes like "(a b" (missing items) are not real subterms
    for t in _preorder(root):
        if isinstance(t, App) and t.fn is s:
            return True
    return False


def _recompose(direction: Direction, known: Term, unknown: Term, limit: int) -> Term:
    if direction is Direction.RIGHT:
        return beta_normalize(App(known, unknown), limit)
    return beta_normalize(App(unknown, known), limit)


def _accept(direction, h, g, f, limit) -> Term | None:
    if f is None or not is_closed(f):
        return None
    try:
        f = beta_normalize(f, limit)
        if not alpha_equiv(_recompose(direction, g, f, limit), h):
            return None
    except NonTerminating:
        return None
    return canonical(f)


def _fresh(t: Term, *more: Term, base="v"):
    avoid = set(all_names(t))
    for m in more:
        avoid |= all_names(m)
    return fresh_name(base, avoid)


def _first_applied_args(body: Term, w: str) -> list[Term] | None:
    """Arguments of the first (pre-order) occurrence of ``w @ a1 @ ... @ ak``."""
    for s in _preorder(body):
        if isinstance(s, App):
            head, args = spine(s)
            if isinstance(head, Var) and head.name == w:
                return args
    return None


def _match(pat: Term, t: Term, pvars: set, sub: dict, env: dict) -> bool:
    """First-order matching of ``pat`` against ``t``.

    ``env`` maps pattern binders to target binders; pattern variables may not
    capture target-bound variables.
    """
    if isinstance(pat, Var):
        if pat.name in env:
            return isinstance(t, Var) and t.name == env[pat.name]
        if pat.name in pvars:
            if t.free_vars & set(env.values()):
                return False
            prev = sub.get(pat.name)
            if prev is None:
                sub[pat.name] = t
                return True
            return alpha_equiv(prev, t)
        return isinstance(t, Var) and t.name == pat.name and t.name not in env.values()
    if isinstance(pat, Const):
        return isinstance(t, Const) and t.name == pat.name
    if isinstance(pat, Lam):
        if not isinstance(t, Lam):
            return False
        return _match(pat.body, t.body, pvars, sub, {**env, pat.var: t.var})
    if not isinstance(t, App):
        return False
    return _match(pat.fn, t.fn, pvars, sub, env) and _match(pat.arg, t.arg, pvars, sub, env)


def _type_raised(g: Term) -> Term | None:
    """If ``g`` is ``\\v. v @ J`` with v not free in J, return J."""
    if isinstance(g, Lam) and isinstance(g.body, App):
        fn, arg = g.body.fn, g.body.arg
        if isinstance(fn, Var) and fn.name == g.var and g.var not in arg.free_vars:
            return arg
    return None


def _gen_r(h: Term, g: Term, depth: int, limit: int) -> Iterator[Term]:
    # case 1: G = \v. v @ J  ->  F = Inverse_L(H, J)
    j = _type_raised(g)
    if j is not None and depth < MAX_DEPTH:
        f = _inverse(Direction.LEFT, h, j, depth + 1, limit)
        if f is not None:
            yield f
    if isinstance(g, Lam):
        # case 2: G = \v. H(J:v)  ->  F = J
        v = g.var
        for cand in _candidates_by_size(h):
            if not is_closed(cand):
                continue
            x = _fresh(h, g)
            if alpha_equiv(Lam(x, replace(h, [cand], [Var(x)])), g):
                yield cand
        # case 3: G = \w. H(J(J1..Jm) : w @ Jp .. @ Jq)  ->  F = \vp..vq. J(J1..Jm : vp..vq)
        args = _first_applied_args(g.body, v)
        if args and all(not (a.free_vars - {v} - h.free_vars) and v not in a.free_vars
                        for a in args):
            for cand in _candidates_by_size(h):
                names = []
                avoid = all_names(h) | all_names(g)
                for _ in args:
                    n = fresh_name("v", avoid)
                    avoid.add(n)
                    names.append(n)
                yield lambdas(names, replace(cand, args, [Var(n) for n in names]))
    else:
        # G is not an abstraction: H must itself be G applied to the unknown
        if isinstance(h, App) and alpha_equiv(h.fn, g):
            yield h.arg


def _gen_l(h: Term, g: Term, depth: int, limit: int) -> Iterator[Term]:
    # case 1 (mirrored): G = \v. v @ J  ->  F = \y. y @ Inverse_L(H, J)
    j = _type_raised(g)
    if j is not None and depth < MAX_DEPTH:
        k = _inverse(Direction.LEFT, h, j, depth + 1, limit)
        if k is not None:
            y = _fresh(k, base="y")
            yield Lam(y, App(Var(y), k))
    # case 2 (mirrored): G is a subterm of H  ->  F = \v. H(G:v)
    g_key = canonical(g)
    if any(canonical(s) == g_key for s in _preorder(h)):
        x = _fresh(h, g)
        yield Lam(x, replace(h, [g], [Var(x)]))
    # case 3 (mirrored): G = \v1..vk. body matching J in H  ->  F = \w. H(J : w @ A1 .. @ Ak)
    if isinstance(g, Lam):
        params = []
        body = g
        while isinstance(body, Lam):
            params.append(body.var)
            body = body.body
        if not isinstance(body, Var) or len(params) > 1:
            for k in range(len(params), 0, -1):
                pvars = params[:k]
                pat = lambdas(params[k:], body)
                if isinstance(pat, Var) and pat.name in pvars:
                    continue
                for cand in _candidates_by_size(h):
                    sub: dict = {}
                    if not _match(pat, cand, set(pvars), sub, {}):
                        continue
                    if any(p not in sub for p in pvars):
                        continue
                    w = _fresh(h, g, base="w")
                    yield Lam(w, replace(h, [cand], [apply(Var(w), *[sub[p] for p in pvars])]))
        # identity argument: F = \w. w @ H
        if isinstance(body, Var) and len(params) == 1 and body.name == params[0]:
            w = _fresh(h, base="w")
            yield Lam(w, App(Var(w), h))
        # delegation: F = \y. y @ Inverse_R(H, G)
        if depth < MAX_DEPTH:
            x = _inverse(Direction.RIGHT, h, g, depth + 1, limit)
            if x is not None:
                y = _fresh(x, base="y")
                yield Lam(y, App(Var(y), x))


def _inverse(direction: Direction, h: Term, g: Term, depth: int, limit: int) -> Term | None:
    h = beta_normalize(h, limit)
    g = beta_normalize(g, limit)
    gen = _gen_r if direction is Direction.RIGHT else _gen_l
    for cand in gen(h, g, depth, limit):
        f = _accept(direction, h, g, cand, limit)
        if f is not None:
            return f
    return None


def inverse_r(h: Term, g: Term, step_limit: int = DEFAULT_STEP_LIMIT) -> Term | None:
    """``F`` such that ``G @ F`` normalizes to ``H``, or None."""
    return _inverse(Direction.RIGHT, h, g, 0, step_limit)


def inverse_l(h: Term, g: Term, step_limit: int = DEFAULT_STEP_LIMIT) -> Term | None:
    """``F`` such that ``F @ G`` normalizes to ``H``, or None."""
    return _inverse(Direction.LEFT, h, g, 0, step_limit)


def solve(problem: InverseProblem, step_limit: int = DEFAULT_STEP_LIMIT) -> InverseSolution:
    op = inverse_r if problem.direction is Direction.RIGHT else inverse_l
    return InverseSolution(op(problem.result, problem.known, step_limit))


def verify(problem: InverseProblem, solution: InverseSolution,
           step_limit: int = DEFAULT_STEP_LIMIT) -> bool:
    if solution.term is None:
        raise ValueError("cannot verify a null solution")
    got = _recompose(problem.direction, problem.known, solution.term, step_limit)
    return alpha_equiv(got, beta_normalize(problem.result, step_limit))
