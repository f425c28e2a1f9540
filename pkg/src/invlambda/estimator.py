"""Estimator front ends: lexicon induction and the trained semantic parser."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .ccg import Category, load_catlex, tokenize
from .corpus import Example, bundled, read_text
from .evaluation import GEO_COMMUTATIVE, EvalReport, score
from .induction import InductionConfig, induce
from .learner import Model, TrainConfig, TrainingExample, learn, parse_best, prepare
from .lexicon import Lexicon
from .mrl import Grammar, NoDerivation, derive, load_cfg
from .terms import render_term

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Resources:
    """The target-language grammar and the word -> categories table."""

    grammar: Grammar
    catlex: Mapping[str, list[Category]]

    @property
    def compounds(self) -> list[str]:
        return sorted(w for w in self.catlex if " " in w)

    @classmethod
    def from_files(cls, cfg_path, catlex_path) -> "Resources":
        return cls(load_cfg(read_text(cfg_path)), load_catlex(read_text(catlex_path)))

    @classmethod
    def bundled(cls, name: str = "geo") -> "Resources":
        cfg = "geo/funql.cfg" if name == "geo" else f"{name}/{name}.cfg"
        return cls(load_cfg(bundled(cfg)), load_catlex(bundled(f"{name}/catlex.tsv")))


def _pairs(X, y=None) -> list[tuple[str, str]]:
    if y is None:
        return [(e.sentence, e.lf) if isinstance(e, Example) else tuple(e) for e in X]
    if len(X) != len(y):
        raise ValueError(f"{len(X)} sentences but {len(y)} logical forms")
    return list(zip(X, y))


def prepare_examples(pairs: Sequence[tuple[str, str]], res: Resources,
                     max_parses: int = 4) -> list[TrainingExample]:
    return prepare(pairs, res.catlex, res.compounds, max_parses)


def induce_lexicon(pairs: Sequence[tuple[str, str]], res: Resources,
                   cfg: InductionConfig = InductionConfig(),
                   examples: Sequence[TrainingExample] | None = None) -> Lexicon:
    """Initial lexicon from the first parse of every sentence that has one."""
    examples = prepare_examples(pairs, res) if examples is None else examples
    corpus, parses, derivations = [], [], []
    for (sentence, lf), ex in zip(pairs, examples):
        if not ex.trees:
            continue
        try:
            d = derive(lf, res.grammar)
        except NoDerivation as exc:
            log.warning("no derivation for %r: %s", lf, exc)
            continue
        corpus.append(Example(sentence, lf))
        parses.append(ex.trees[0])
        derivations.append(d)
    return induce(corpus, parses, derivations, res.grammar, cfg)


def _resources(grammar, catlex) -> Resources:
    if grammar is None and catlex is None:
        return Resources.bundled("geo")
    if grammar is None or catlex is None:
        raise ValueError("give both grammar and catlex, or neither")
    if isinstance(grammar, (str, Path)):
        grammar = load_cfg(read_text(grammar))
    if isinstance(catlex, (str, Path)):
        catlex = load_catlex(read_text(catlex))
    return Resources(grammar, catlex)


class LexiconInducer(BaseEstimator):
    """Builds an initial lexicon from sentence / logical-form pairs.

    ``grammar`` and ``catlex`` are objects or file paths; with neither, the
    bundled geography resources are used.
    """

    def __init__(self, grammar=None, catlex=None, maxlevel: int = 2, accuracy: float = 0.7):
        self.grammar = grammar
        self.catlex = catlex
        self.maxlevel = maxlevel
        self.accuracy = accuracy

    def fit(self, X, y=None):
        res = _resources(self.grammar, self.catlex)
        self.lexicon_ = induce_lexicon(_pairs(X, y), res,
                                       InductionConfig(self.maxlevel, self.accuracy))
        return self

    def transform(self, X=None) -> Lexicon:
        check_is_fitted(self, "lexicon_")
        return self.lexicon_


class SemanticParser(BaseEstimator):
    """Sentence -> logical form, learned with inverse lambda and a log-linear CCG.

    ``fit`` induces an initial lexicon unless ``lexicon`` is given, then
    trains for ``iterations`` passes. ``predict`` returns the rendered
    best meaning per sentence, or None when no grammatical parse exists.
    ``score`` is the F-measure under ``mode`` ("execute" or "match").
    """

    def __init__(self, grammar=None, catlex=None, lexicon: Lexicon | None = None,
                 iterations: int = 10, alpha0: float = 0.1, decay: float = 0.001,
                 chart_cap: int = 200, maxlevel: int = 2, accuracy: float = 0.7,
                 trivial: bool = True, generalize: bool = True, mode: str = "execute",
                 commutative: Iterable[str] = GEO_COMMUTATIVE, clang_i: bool = False):
        self.grammar = grammar
        self.catlex = catlex
        self.lexicon = lexicon
        self.iterations = iterations
        self.alpha0 = alpha0
        self.decay = decay
        self.chart_cap = chart_cap
        self.maxlevel = maxlevel
        self.accuracy = accuracy
        self.trivial = trivial
        self.generalize = generalize
        self.mode = mode
        self.commutative = commutative
        self.clang_i = clang_i

    def _train_config(self) -> TrainConfig:
        return TrainConfig(iterations=self.iterations, alpha0=self.alpha0, decay=self.decay,
                           chart_cap=self.chart_cap, trivial=self.trivial,
                           generalize=self.generalize, accuracy=self.accuracy)

    def fit(self, X, y=None):
        res = _resources(self.grammar, self.catlex)
        pairs = _pairs(X, y)
        examples = prepare_examples(pairs, res)
        if self.lexicon is None:
            lex = induce_lexicon(pairs, res, InductionConfig(self.maxlevel, self.accuracy),
                                 examples)
        else:
            lex = self.lexicon
        self.resources_ = res
        self.model_ = learn(examples, lex, self._train_config(), res.catlex)
        return self

    @classmethod
    def from_model(cls, model: Model, grammar=None, catlex=None, **params) -> "SemanticParser":
        cfg = model.config
        est = cls(grammar, catlex, iterations=cfg.iterations, alpha0=cfg.alpha0, decay=cfg.decay,
                  chart_cap=cfg.chart_cap, accuracy=cfg.accuracy, trivial=cfg.trivial,
                  generalize=cfg.generalize, **params)
        est.resources_ = _resources(grammar, catlex)
        est.model_ = model
        return est

    def parse(self, sentence: str):
        check_is_fitted(self, "model_")
        tokens = tokenize(sentence, self.resources_.compounds)
        return parse_best(tokens, self.model_, self.resources_.grammar)

    def predict(self, X) -> list[str | None]:
        sentences = [e.sentence for e in X] if X and isinstance(X[0], Example) else list(X)
        out = []
        for s in sentences:
            p = self.parse(s)
            out.append(None if p is None else render_term(p.term))
        return out

    def report(self, X, y=None) -> EvalReport:
        pairs = _pairs(X, y)
        got = self.predict([s for s, _ in pairs])
        return score([(lf, g) for (_, lf), g in zip(pairs, got)], self.mode,
                     commutative=self.commutative, clang_i=self.clang_i)

    def score(self, X, y=None) -> float:
        return self.report(X, y).f_measure
