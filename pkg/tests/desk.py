"""The end-to-end desk run on the bundled geography corpus."""

import contextlib
import io
import time
from dataclasses import dataclass
from pathlib import Path

from invlambda.cli import main
from invlambda.corpus import bundled, load_corpus
from invlambda.estimator import Resources, SemanticParser, induce_lexicon, prepare_examples
from invlambda.evaluation import is_correct
from invlambda.learner import Model, TrainConfig, learn


@dataclass
class DeskRun:
    model: bytes
    report: bytes
    loo: bytes
    train_correct: int
    total: int
    loo_recall: float
    seconds: float


def _cli(argv) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        rc = main(argv)
    assert rc == 0, f"{argv[0]} exited with {rc}"
    return buf.getvalue()


def closed_vocabulary(pairs, res):
    """Indices of sentences whose every token also occurs in another sentence."""
    tokens = [set(e.tokens) for e in prepare_examples(pairs, res)]
    return [i for i, toks in enumerate(tokens)
            if all(any(t in other for j, other in enumerate(tokens) if j != i) for t in toks)]


def leave_one_out(pairs, res, indices, iterations=10):
    lines, hits = [], 0
    for i in indices:
        train = pairs[:i] + pairs[i + 1:]
        examples = prepare_examples(train, res)
        model = learn(examples, induce_lexicon(train, res, examples=examples),
                      TrainConfig(iterations=iterations), res.catlex)
        (got,) = SemanticParser.from_model(model, res.grammar, res.catlex).predict([pairs[i][0]])
        ok = got is not None and is_correct(pairs[i][1], got)
        hits += ok
        lines.append(f"{i}\t{'ok' if ok else 'miss'}\t{pairs[i][0]}\t{got or '-'}")
    recall = hits / len(indices) if indices else 0.0
    lines.append(f"recall\t{hits}/{len(indices)}\t{recall:.4f}")
    return "\n".join(lines) + "\n", recall


def desk_run(workdir: Path, seed: int = 7, iterations: int = 10) -> DeskRun:
    start = time.perf_counter()
    workdir.mkdir(parents=True, exist_ok=True)
    for name, src in [("corpus.txt", "geo/corpus.txt"), ("funql.cfg", "geo/funql.cfg"),
                      ("catlex.tsv", "geo/catlex.tsv")]:
        (workdir / name).write_text(bundled(src))
    common = ["--corpus", str(workdir / "corpus.txt"), "--cfg", str(workdir / "funql.cfg"),
              "--catlex", str(workdir / "catlex.tsv")]
    _cli(["induce", *common, "-o", str(workdir / "lexicon.tsv")])
    _cli(["train", *common, "--lexicon", str(workdir / "lexicon.tsv"),
          "--iters", str(iterations), "-o", str(workdir / "model.tsv")])
    report = _cli(["eval", *common, "--model", str(workdir / "model.tsv"), "--k", "10",
                   "--seed", str(seed), "--mode", "execute"])
    (workdir / "report.tsv").write_text(report)

    res = Resources.bundled("geo")
    corpus = load_corpus(bundled("geo/corpus.txt"))
    pairs = [(e.sentence, e.lf) for e in corpus]
    model = Model.load((workdir / "model.tsv").read_text())
    rep = SemanticParser.from_model(model, res.grammar, res.catlex).report(pairs)
    loo, recall = leave_one_out(pairs, res, closed_vocabulary(pairs, res), iterations)
    (workdir / "loo.tsv").write_text(loo)
    return DeskRun((workdir / "model.tsv").read_bytes(), report.encode(), loo.encode(),
                   rep.correct, rep.total, recall, time.perf_counter() - start)
