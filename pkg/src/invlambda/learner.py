"""Lexicon learning with inverse lambda operators and log-linear parameter estimation.

One pass of :func:`learn` visits the training pairs in order. For each pair it

1. extracts new word meanings top-down through the parse with the inverse
   operators, falling back to on-demand generalization and, as a last
   resort, the trivial meanings ``\\x. x`` and ``\\x. \\y. y @ x``;
2. takes one stochastic gradient step on the conditional log-likelihood of
   the logical form, marginalizing over derivations.

After the last pass the lexicon is generalized en masse.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Mapping, Sequence

from .ccg import (FORWARD_APP, PUNCTUATION, Atom, Category, CcgTree, NoParse, cky_parse,
                  combine_rule, load_catlex, tokenize, word_levels)
from .chart import DEFAULT_CAP, build_chart, compose
from .induction import fold, similarity
from .inverse import inverse_l, inverse_r
from .lexicon import (HEADER, INITIAL_WEIGHT, Lexicon, LexiconEntry, Provenance,
                      dump_lexicon, load_lexicon)
from .mrl import AmbiguousDerivation, Grammar, NoDerivation, derive
from .terms import (App, Const, Lam, NonTerminating, Term, beta_normalize, canonical,
                    constants, iter_subterms, parse_term, render_term, replace)
from .typecheck import Signature, TypeClash, infer_type

log = logging.getLogger(__name__)

TRIVIAL_TERMS = (r"\x. x", r"\x. \y. y @ x")
MAX_KNOWN = 16


class DegenerateExample(ValueError):
    """No derivation in the chart yields the gold logical form."""


@dataclass
class TrainConfig:
    iterations: int = 10
    alpha0: float = 0.1
    decay: float = 0.001
    chart_cap: int = DEFAULT_CAP
    trivial: bool = True
    generalize: bool = True
    accuracy: float = 0.7
    max_parses: int = 4
    step_limit: int = 10_000

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")

    def rate(self, t: int) -> float:
        return self.alpha0 / (1.0 + self.decay * t)

    def header(self) -> str:
        return "\t".join(f"{k}={v}" for k, v in asdict(self).items())

    @classmethod
    def from_header(cls, text: str) -> "TrainConfig":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for part in text.lstrip("#").split("\t"):
            k, sep, v = part.strip().partition("=")
            if not sep or k not in types:
                continue
            kw[k] = (v == "True") if types[k] in ("bool", bool) else \
                (int(v) if types[k] in ("int", int) else float(v))
        return cls(**kw)


@dataclass
class Model:
    lexicon: Lexicon
    theta: dict = field(default_factory=dict)
    iteration: int = 0
    config: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        self.sync()

    def sync(self):
        """Give every entry a parameter, starting from the entry's weight."""
        for e in self.lexicon:
            self.theta.setdefault(e.key, e.weight)

    def weighted_lexicon(self) -> Lexicon:
        return Lexicon(e.with_weight(self.theta[e.key]) for e in self.lexicon)

    def dump(self) -> str:
        head = f"# model\titeration={self.iteration}\t{self.config.header()}"
        return head + "\n" + dump_lexicon(self.weighted_lexicon())

    @classmethod
    def load(cls, text: str) -> "Model":
        first, _, rest = text.partition("\n")
        if not first.startswith("# model"):
            raise ValueError("model file must start with a '# model' header line")
        cfg = TrainConfig.from_header(first.replace("# model", "", 1))
        iteration = 0
        for part in first.split("\t"):
            if part.startswith("iteration="):
                iteration = int(part.split("=", 1)[1])
        lex = load_lexicon(rest)
        return cls(lex, {e.key: e.weight for e in lex}, iteration, cfg)


# --------------------------------------------------------------------------
# generalization and trivial meanings

def _known_constants(lex: Iterable[LexiconEntry]) -> set[str]:
    out: set[str] = set()
    for e in lex:
        out |= constants(e.semantics)
    return out


def derive_constant(word: str, template: str, vocabulary: Iterable[str] = (),
                    accuracy: float = 0.7) -> str:
    """The constant a word stands for, shaped like ``template`` (quoted or not)."""
    quoted = template.startswith("'")
    pool = sorted(c for c in vocabulary if c.startswith("'") == quoted)
    scored = [(similarity(word, c), c) for c in pool]
    scored = [sc for sc in scored if sc[0] >= accuracy]
    if scored:
        return max(scored, key=lambda sc: (sc[0], [-ord(ch) for ch in sc[1]]))[1]
    if quoted:
        return "'" + " ".join(word.lower().split()) + "'"
    return fold(word).replace(" ", "_") or word.lower()


def generalize_on_demand(lex: Lexicon, word: str, cat: Category,
                         vocabulary: Iterable[str] | None = None,
                         accuracy: float = 0.7) -> list[LexiconEntry]:
    """Borrow the meanings of same-category words, swapping their word-like constant."""
    vocab = _known_constants(lex) if vocabulary is None else set(vocabulary)
    out: dict[tuple, LexiconEntry] = {}
    target = " ".join(word.lower().split())
    for donor in lex:
        if donor.category != cat or donor.phrase == target:
            continue
        consts = sorted(constants(donor.semantics))
        scored = [(similarity(donor.phrase, c), c) for c in consts]
        scored = [sc for sc in scored if sc[0] >= accuracy]
        if not scored:
            continue
        old = max(scored, key=lambda sc: (sc[0], [-ord(ch) for ch in sc[1]]))[1]
        new = derive_constant(word, old, vocab, accuracy)
        term = replace(donor.semantics, [Const(old)], [Const(new)])
        e = LexiconEntry(word, cat, term, INITIAL_WEIGHT, Provenance.GENERALIZED)
        if e.key not in lex:
            out.setdefault(e.key, e)
    return [out[k] for k in sorted(out)]


def generalize_mass(lex: Lexicon, vocabulary: Mapping[str, Iterable[Category]] | None = None,
                    accuracy: float = 0.7) -> Lexicon:
    """Fill every known (word, category) pair that has no meaning from donors in ``lex``.

    The pairs come from ``vocabulary`` (word -> categories, e.g. a category
    lexicon); without one, only the lexicon's own pairs are considered.
    """
    out = lex.copy()
    pairs = set()
    if vocabulary:
        for w, cats in vocabulary.items():
            for c in cats:
                pairs.add((" ".join(w.lower().split()), c))
    for e in lex:
        pairs.add((e.phrase, e.category))
    consts = _known_constants(lex)
    for w, c in sorted(pairs, key=lambda p: (p[0], str(p[1]))):
        if lex.has(w, c):
            continue
        out.update(generalize_on_demand(lex, w, c, consts, accuracy))
    return out


def trivial_entries(word: str, cat: Category, lex: Lexicon | None = None) -> list[LexiconEntry]:
    """``\\x. x`` and ``\\x. \\y. y @ x``, unless the word already has a meaning for ``cat``."""
    if lex is not None and lex.has(word, cat):
        return []
    return [LexiconEntry(word, cat, parse_term(t), INITIAL_WEIGHT, Provenance.TRIVIAL)
            for t in TRIVIAL_TERMS]


# --------------------------------------------------------------------------
# extraction with the inverse operators

def _normal(t: Term, limit: int) -> Term | None:
    try:
        return canonical(beta_normalize(t, limit))
    except NonTerminating:
        return None


def _vacuous(t: Term) -> bool:
    for s in iter_subterms(t):
        if isinstance(s, Lam) and s.var not in s.body.free_vars:
            return True
    return False


def well_formed(t: Term, sig: Signature | None = None) -> bool:
    """Every binder is used and the term has a simple type."""
    if _vacuous(t):
        return False
    try:
        infer_type(t, sig)
    except TypeClash:
        return False
    return True


class _Extractor:
    def __init__(self, lex: Lexicon, step_limit: int, theta: Mapping | None = None):
        self.lex = lex
        self.theta = theta or {}
        self.limit = step_limit
        self.known_cache: dict[int, list[Term]] = {}
        self.found: dict[tuple, LexiconEntry] = {}
        self.visited: set = set()

    def known(self, n: CcgTree) -> list[Term]:
        """Meanings of ``n`` composable from the current lexicon (capped)."""
        key = id(n)
        if key in self.known_cache:
            return self.known_cache[key]
        out: list[Term] = []
        if n.is_leaf:
            if n.word in PUNCTUATION and not self.lex.has(n.word, n.category):
                out = [parse_term(r"\x. x")]
            else:
                found = self.lex.entries_for(n.word, n.category)
                found.sort(key=lambda e: -self.theta.get(e.key, e.weight))
                out = [e.semantics for e in found][:MAX_KNOWN]
        else:
            fns, args = (self.known(n.left), self.known(n.right)) if n.rule == FORWARD_APP \
                else (self.known(n.right), self.known(n.left))
            seen = set()
            for f in fns:
                for a in args:
                    t = compose(f, a, self.limit)
                    if t is not None and t not in seen:
                        seen.add(t)
                        out.append(t)
                        if len(out) >= MAX_KNOWN:
                            break
                if len(out) >= MAX_KNOWN:
                    break
        self.known_cache[key] = out
        return out

    def down(self, n: CcgTree, h: Term, is_root: bool = False):
        key = (id(n), h)
        if key in self.visited:
            return
        self.visited.add(key)
        if not is_root and h not in self.known(n):
            e = LexiconEntry(n.phrase, n.category, h, INITIAL_WEIGHT, Provenance.INVERSE)
            if e.key not in self.lex and well_formed(h):
                self.found.setdefault(e.key, e)
        if n.is_leaf:
            return
        fn_child, arg_child = (n.left, n.right) if n.rule == FORWARD_APP else (n.right, n.left)
        for a in self.known(arg_child):
            f = inverse_l(h, a, self.limit)
            if f is not None:
                self.down(fn_child, f)
        for f in self.known(fn_child):
            a = inverse_r(h, f, self.limit)
            if a is not None:
                self.down(arg_child, a)


def extract_by_inverse(tree: CcgTree, target: Term, lex: Lexicon,
                       step_limit: int = 10_000, theta: Mapping | None = None) -> list[LexiconEntry]:
    """New (phrase, category, meaning) triples forced by ``target`` and ``lex``.

    Walks the tree from the root: wherever a node's meaning and one child's
    meaning are known, the other child's meaning comes from the inverse
    operators. Internal phrases are reported as well as single words.
    """
    target = _normal(target, step_limit)
    if target is None:
        return []
    ex = _Extractor(lex, step_limit, theta)
    ex.down(tree, target, is_root=True)
    return [ex.found[k] for k in sorted(ex.found)]


def derivable(tree: CcgTree, target: Term, lex: Lexicon, step_limit: int = 10_000) -> bool:
    return _normal(target, step_limit) in _Extractor(lex, step_limit).known(tree)


# --------------------------------------------------------------------------
# log-linear model

def _chart(tokens, model: Model):
    return build_chart(tokens, model.lexicon, model.theta, model.config.chart_cap,
                       step_limit=model.config.step_limit)


def log_likelihood(model: Model, examples: Sequence[tuple[Sequence[str], Term]]) -> float:
    total = 0.0
    for tokens, lf in examples:
        ch = _chart(tokens, model)
        gold = ch.item_for(lf)
        if gold is None:
            continue
        total += gold.logz - ch.log_partition()
    return total


def gradient(model: Model, tokens: Sequence[str], lf: Term) -> dict:
    """E[features | derivations of lf] - E[features | all derivations]."""
    ch = _chart(tokens, model)
    gold = ch.item_for(lf)
    if gold is None:
        raise DegenerateExample(" ".join(tokens))
    return chart_gradient(ch, gold)


def chart_gradient(ch, gold) -> dict:
    grad = ch.expected_features([gold])
    for k, v in ch.expected_features().items():
        grad[k] = grad.get(k, 0.0) - v
    return grad


def update_params(model: Model, examples: Iterable[tuple[Sequence[str], Term]]) -> Model:
    """One stochastic gradient step per example, in order."""
    model.sync()
    for tokens, lf in examples:
        try:
            grad = gradient(model, tokens, lf)
        except DegenerateExample:
            log.debug("no derivation yields the gold form for %r", " ".join(tokens))
            continue
        _step(model, grad)
    return model


def _step(model: Model, grad: Mapping):
    rate = model.config.rate(model.iteration)
    for k, g in grad.items():
        if g:
            model.theta[k] = model.theta[k] + rate * g
    model.iteration += 1


@dataclass(frozen=True)
class Parse:
    term: Term
    tree: CcgTree
    entries: tuple
    probability: float


def parse_best(tokens: Sequence[str], model: Model, grammar: Grammar | None = None) -> Parse | None:
    """Highest-scoring derivation; ``probability`` is its share of the partition.

    With a ``grammar``, derivations whose meaning is not a sentence of the
    meaning representation language are passed over.
    """
    if not tokens:
        return None
    ch = _chart(tokens, model)
    best = None
    for it in ch.ranked_roots():
        if grammar is None or well_formed_mr(it.term, grammar):
            best = it
            break
    if best is None:
        return None
    tree, entries = ch.derivation(best)
    prob = math.exp(best.best - ch.log_partition())
    return Parse(best.term, tree, tuple(entries), prob)


def well_formed_mr(t: Term, grammar: Grammar) -> bool:
    """Whether ``t`` renders to a string the MRL grammar derives."""
    try:
        derive(render_term(t), grammar)
    except (NoDerivation, AmbiguousDerivation):
        return False
    return True


# --------------------------------------------------------------------------
# the training loop

@dataclass
class TrainingExample:
    tokens: list[str]
    target: Term
    trees: list[CcgTree]


def prepare(examples, catlex: Mapping[str, list[Category]], compounds: Iterable[str] = (),
            max_parses: int = 4) -> list[TrainingExample]:
    """Tokenize, parse and read the logical forms of ``(sentence, lf)`` pairs."""
    out = []
    compounds = list(compounds)
    for sentence, lf in examples:
        tokens = tokenize(sentence, compounds)
        try:
            trees = cky_parse(tokens, catlex)[:max_parses]
        except NoParse as exc:
            log.warning("skipping unparsable sentence %r: %s", sentence, exc)
            trees = []
        target = lf if isinstance(lf, Term) else parse_term(lf)
        out.append(TrainingExample(tokens, target, trees))
    return out


def _missing_leaves(tree: CcgTree, lex: Lexicon) -> list[CcgTree]:
    levels = word_levels(tree)
    leaves = [lf for lf in tree.leaves()
              if lf.word not in PUNCTUATION and not lex.has(lf.word, lf.category)]
    return sorted(leaves, key=lambda lf: levels.get(lf.word, 0))


def lexical_generation(ex: TrainingExample, lex: Lexicon, cfg: TrainConfig,
                       theta: Mapping | None = None) -> list[LexiconEntry]:
    """Grow ``lex`` until some derivation of the example yields its logical form.

    Returns the entries added (nothing when the form is already derivable).
    """
    added: list[LexiconEntry] = []
    vocab = None

    def reachable() -> bool:
        ch = build_chart(ex.tokens, lex, theta, cfg.chart_cap, step_limit=cfg.step_limit)
        return ch.item_for(ex.target) is not None

    if reachable():
        return added
    for tree in ex.trees:
        leaf_words = {(lf.word.lower(), lf.category) for lf in tree.leaves()}
        for _ in range(len(leaf_words) + 1):
            new = [e for e in extract_by_inverse(tree, ex.target, lex, cfg.step_limit, theta)
                   if (e.phrase, e.category) in leaf_words]
            # contentful meanings first, stopping once the form is derivable
            grew = []
            for e in sorted(new, key=_preference):
                if lex.add(e):
                    grew.append(e)
                    if reachable():
                        return added + grew
            added += grew
            missing = _missing_leaves(tree, lex)
            if not missing:
                break
            grew = []
            if cfg.generalize:
                if vocab is None:
                    vocab = _known_constants(lex)
                for lf in missing:
                    grew += lex.update(generalize_on_demand(lex, lf.word, lf.category, vocab,
                                                            cfg.accuracy))
            if not grew and cfg.trivial:
                lf = missing[0]
                grew += lex.update(trivial_entries(lf.word, lf.category, lex))
            if not grew:
                break
            added += grew
    # last resort: meanings for multiword phrases, shortest first, never the whole sentence
    words = [t for t in ex.tokens if t not in PUNCTUATION]
    for tree in ex.trees:
        leaf_words = {(lf.word.lower(), lf.category) for lf in tree.leaves()}
        found = [e for e in extract_by_inverse(tree, ex.target, lex, cfg.step_limit, theta)
                 if (e.phrase, e.category) not in leaf_words
                 and len(e.phrase.split()) < len(" ".join(words).split())]
        for e in sorted(found, key=lambda e: (len(e.phrase.split()), _preference(e))):
            if lex.add(e):
                added.append(e)
                if reachable():
                    return added
    return added


def _preference(e: LexiconEntry):
    # predicates before plumbing, then smaller terms
    return (-len(constants(e.semantics)), e.semantics.size, e.key)


def learn(examples: Sequence[TrainingExample], lexicon: Lexicon, cfg: TrainConfig = TrainConfig(),
          vocabulary: Mapping[str, Iterable[Category]] | None = None) -> Model:
    """Alternate lexical generation and parameter updates, then generalize en masse."""
    model = Model(lexicon.copy(), {}, 0, cfg)
    if not examples:
        return model
    for epoch in range(cfg.iterations):
        grown = 0
        for ex in examples:
            if not ex.trees:
                continue
            ch = _chart(ex.tokens, model)
            gold = ch.item_for(ex.target)
            if gold is None:
                grown += len(lexical_generation(ex, model.lexicon, cfg, model.theta))
                model.sync()
                ch = _chart(ex.tokens, model)
                gold = ch.item_for(ex.target)
            if gold is not None:
                _step(model, chart_gradient(ch, gold))
        log.info("pass %d: %d new entries, %d total", epoch + 1, grown, len(model.lexicon))
    final = generalize_mass(model.lexicon, vocabulary, cfg.accuracy)
    model.lexicon = final
    model.sync()
    return model
