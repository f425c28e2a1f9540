import subprocess
import sys

import pytest

from invlambda.cli import main
from invlambda.corpus import bundled, dump_corpus, load_corpus
from invlambda.learner import Model
from invlambda.lexicon import load_lexicon


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    corpus = load_corpus(bundled("geo/corpus.txt"))[:12]
    (d / "corpus.txt").write_text(dump_corpus(corpus))
    (d / "funql.cfg").write_text(bundled("geo/funql.cfg"))
    (d / "catlex.tsv").write_text(bundled("geo/catlex.tsv"))
    return d


def common(d):
    return ["--corpus", str(d / "corpus.txt"), "--cfg", str(d / "funql.cfg"),
            "--catlex", str(d / "catlex.tsv")]


def test_inverse_left(tmp_path, capsys):
    (tmp_path / "h").write_text("answer(river(loc_2(stateid('arkansas'))))\n")
    (tmp_path / "g").write_text("river(loc_2(stateid('arkansas')))\n")
    rc = main(["inverse", "--dir", "left", "--result", str(tmp_path / "h"),
               "--known", str(tmp_path / "g")])
    assert rc == 0 and capsys.readouterr().out.strip() == r"\x. answer(x)"


def test_inverse_null(tmp_path, capsys):
    (tmp_path / "h").write_text("answer(a)")
    (tmp_path / "g").write_text(r"\x. river(x)")
    assert main(["inverse", "--dir", "right", "--result", str(tmp_path / "h"),
                 "--known", str(tmp_path / "g")]) == 0
    assert capsys.readouterr().out.strip() == "null"


@pytest.fixture(scope="module")
def trained(files):
    assert main(["induce", *common(files), "-o", str(files / "lexicon.tsv")]) == 0
    assert main(["train", *common(files), "--lexicon", str(files / "lexicon.tsv"),
                 "--iters", "3", "-o", str(files / "model.tsv")]) == 0
    return files


def test_induce_and_train_write_files(trained):
    lex = load_lexicon((trained / "lexicon.tsv").read_text())
    assert lex.entries_for("name")
    model = Model.load((trained / "model.tsv").read_text())
    assert model.config.iterations == 3 and len(model.lexicon) >= len(lex)


def test_eval_report(trained, capsys):
    rc = main(["eval", *common(trained), "--model", str(trained / "model.tsv"),
               "--k", "3", "--seed", "7", "--mode", "execute"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert lines[0].split("\t") == ["fold", "total", "returned", "correct", "precision",
                                    "recall", "f"]
    assert [ln.split("\t")[0] for ln in lines[1:]] == ["0", "1", "2", "all"]
    total = lines[-1].split("\t")
    assert total[1] == "12" and float(total[-1]) == pytest.approx(1.0)


def test_eval_match_mode(trained, capsys):
    rc = main(["eval", *common(trained), "--model", str(trained / "model.tsv"),
               "--k", "2", "--mode", "match", "--clang-i"])
    assert rc == 0 and capsys.readouterr().out.splitlines()[-1].startswith("all\t12\t")


def test_eval_bad_k_is_a_configuration_error(trained, capsys):
    rc = main(["eval", *common(trained), "--model", str(trained / "model.tsv"), "--k", "100"])
    assert rc == 2 and "error" in capsys.readouterr().err


def test_missing_file_is_a_configuration_error(files, capsys):
    rc = main(["train", *common(files), "--lexicon", str(files / "nope.tsv"), "-o", "-"])
    assert rc == 2 and "cannot read" in capsys.readouterr().err


def test_bad_grammar_is_a_configuration_error(files, tmp_path):
    (tmp_path / "bad.cfg").write_text('S -> "a(" X ")"\n')
    args = common(files)
    args[3] = str(tmp_path / "bad.cfg")
    assert main(["induce", *args]) == 2


def test_module_entry_point(tmp_path):
    (tmp_path / "h").write_text("river(loc_2(stateid('arkansas')))")
    (tmp_path / "g").write_text(r"\x. river(x)")
    out = subprocess.run([sys.executable, "-m", "invlambda", "inverse", "--dir", "right",
                          "--result", str(tmp_path / "h"), "--known", str(tmp_path / "g")],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "loc_2(stateid('arkansas'))"
