"""Command line: inverse, induce, train, eval."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .ccg import load_catlex
from .corpus import load_corpus, read_text
from .evaluation import CLANG_COMMUTATIVE, EvalReport, kfold
from .estimator import Resources, SemanticParser, induce_lexicon, prepare_examples
from .induction import InductionConfig
from .inverse import inverse_l, inverse_r
from .learner import Model, TrainConfig, learn
from .lexicon import dump_lexicon, load_lexicon
from .mrl import load_cfg
from .terms import NonTerminating, parse_term, render_term

log = logging.getLogger("invlambda")


class ConfigError(Exception):
    """Bad input files or options; exit status 2."""


def _read(path) -> str:
    try:
        return read_text(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _resources(args) -> Resources:
    return Resources(load_cfg(_read(args.cfg)), load_catlex(_read(args.catlex)))


def _corpus(path):
    return [(e.sentence, e.lf) for e in load_corpus(_read(path))]


def cmd_inverse(args) -> int:
    h = parse_term(_read(args.result).strip())
    g = parse_term(_read(args.known).strip())
    f = inverse_l(h, g) if args.dir == "left" else inverse_r(h, g)
    print("null" if f is None else render_term(f))
    return 0


def cmd_induce(args) -> int:
    cfg = InductionConfig(args.maxlevel, args.accuracy)
    lex = induce_lexicon(_corpus(args.corpus), _resources(args), cfg)
    _write(args.output, dump_lexicon(lex.sorted()))
    return 0


def cmd_train(args) -> int:
    res = _resources(args)
    lex = load_lexicon(_read(args.lexicon))
    cfg = TrainConfig(iterations=args.iters, chart_cap=args.chart_cap)
    model = learn(prepare_examples(_corpus(args.corpus), res), lex, cfg, res.catlex)
    _write(args.output, model.dump())
    return 0


def _row(name, rep: EvalReport) -> str:
    return (f"{name}\t{rep.total}\t{rep.returned}\t{rep.correct}\t"
            f"{rep.precision:.4f}\t{rep.recall:.4f}\t{rep.f_measure:.4f}")


def cmd_eval(args) -> int:
    res = _resources(args)
    pairs = _corpus(args.corpus)
    model = Model.load(_read(args.model))
    folds = kfold(pairs, args.k, args.seed)
    commutative = CLANG_COMMUTATIVE if args.mode == "match" else ()
    est = SemanticParser.from_model(model, res.grammar, res.catlex, mode=args.mode,
                                    commutative=commutative, clang_i=args.clang_i)
    rows, total = [], EvalReport()
    for i, (train, test) in enumerate(folds):
        if args.retrain:
            cfg = model.config
            examples = prepare_examples(train, res)
            lex = induce_lexicon(train, res, InductionConfig(accuracy=cfg.accuracy), examples)
            est.model_ = learn(examples, lex, cfg, res.catlex)
        rep = est.report(test)
        rows.append(_row(i, rep))
        total = total.merge(rep)
    out = ["fold\ttotal\treturned\tcorrect\tprecision\trecall\tf", *rows, _row("all", total)]
    if args.verbose:
        out += [f"#\t{'ok' if v.correct else 'wrong' if v.returned else 'none'}\t{v.gold}\t"
                f"{v.returned if v.returned is not None else '-'}" for v in total.verdicts]
    print("\n".join(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invlambda", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("inverse", help="solve for the unknown operand of an application")
    s.add_argument("--dir", choices=("left", "right"), required=True)
    s.add_argument("--result", required=True, help="file holding the result term H")
    s.add_argument("--known", required=True, help="file holding the known operand G")
    s.set_defaults(func=cmd_inverse)

    def resources(s):
        s.add_argument("--corpus", required=True)
        s.add_argument("--cfg", required=True, help="target-language grammar")
        s.add_argument("--catlex", required=True, help="word<TAB>categories table")

    s = sub.add_parser("induce", help="build an initial lexicon")
    resources(s)
    s.add_argument("--maxlevel", type=int, default=2)
    s.add_argument("--accuracy", type=float, default=0.7)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_induce)

    s = sub.add_parser("train", help="learn a lexicon and weights")
    resources(s)
    s.add_argument("--lexicon", required=True)
    s.add_argument("--iters", type=int, default=10)
    s.add_argument("--chart-cap", type=int, default=TrainConfig.chart_cap)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", help="k-fold precision, recall and F-measure")
    resources(s)
    s.add_argument("--model", required=True)
    s.add_argument("--k", type=int, default=10)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--mode", choices=("execute", "match"), default="execute")
    s.add_argument("--clang-i", action="store_true",
                   help="treat definec and definer heads as equal")
    s.add_argument("--retrain", action="store_true",
                   help="retrain on each fold's training part with the model's settings")
    s.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, NonTerminating) as exc:
        # bad k, malformed files and grammars all derive from ValueError
        print(f"invlambda: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
