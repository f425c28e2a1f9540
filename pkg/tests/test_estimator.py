import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from invlambda.estimator import LexiconInducer, Resources, SemanticParser
from invlambda.evaluation import CLANG_COMMUTATIVE
from invlambda.lexicon import Lexicon


@pytest.fixture(scope="module")
def small(geo_corpus):
    return geo_corpus[:12]


def test_inducer_fit_transform(small):
    ind = LexiconInducer().fit(small)
    lex = ind.transform()
    assert isinstance(lex, Lexicon) and len(lex) > 0
    assert lex.entries_for("name")


def test_inducer_accepts_sentence_and_lf_lists(small):
    a = LexiconInducer().fit([e.sentence for e in small], [e.lf for e in small]).lexicon_
    assert a == LexiconInducer().fit(small).lexicon_


def test_inducer_length_mismatch(small):
    with pytest.raises(ValueError):
        LexiconInducer().fit(["a"], [])


def test_half_resources_rejected(small, geo):
    with pytest.raises(ValueError):
        LexiconInducer(grammar=geo.grammar).fit(small)


def test_unfitted():
    with pytest.raises(NotFittedError):
        SemanticParser().predict(["Name the rivers in Texas ."])
    with pytest.raises(NotFittedError):
        LexiconInducer().transform()


def test_get_params_and_clone():
    est = SemanticParser(iterations=3, chart_cap=20)
    params = est.get_params()
    assert params["iterations"] == 3 and params["chart_cap"] == 20
    twin = clone(est)
    assert twin.get_params() == params and twin is not est


def test_fit_predict_score(small):
    est = SemanticParser(iterations=3).fit(small)
    got = est.predict([e.sentence for e in small])
    assert got[0] == small[0].lf
    assert est.score(small) == pytest.approx(1.0)
    rep = est.report(small)
    assert rep.total == len(small) and rep.correct == rep.returned == len(small)


def test_predict_unknown_sentence(small):
    est = SemanticParser(iterations=1).fit(small)
    assert est.predict(["Frobnicate the wibble ."]) == [None]


def test_given_lexicon_is_used(small):
    seed = LexiconInducer().fit(small).lexicon_
    est = SemanticParser(lexicon=seed, iterations=1).fit(small)
    assert all(e in est.model_.lexicon for e in seed)


def test_from_model(small):
    est = SemanticParser(iterations=2).fit(small)
    again = SemanticParser.from_model(est.model_)
    assert again.iterations == 2
    assert again.predict([small[1].sentence]) == est.predict([small[1].sentence])


def test_clang_pipeline(clang, clang_corpus):
    est = SemanticParser(clang.grammar, clang.catlex, iterations=3, mode="match",
                         commutative=CLANG_COMMUTATIVE).fit(clang_corpus)
    rep = est.report(clang_corpus)
    # four sentences are too few to pin down every word of the if/then rules
    assert rep.precision == pytest.approx(1.0)
    definer = [e for e in clang_corpus if "definer" in e.lf]
    assert est.predict([e.sentence for e in definer]) == [e.lf for e in definer]


def test_resources_from_files(tmp_path):
    from invlambda.corpus import bundled
    (tmp_path / "g.cfg").write_text(bundled("geo/funql.cfg"))
    (tmp_path / "c.tsv").write_text(bundled("geo/catlex.tsv"))
    res = Resources.from_files(tmp_path / "g.cfg", tmp_path / "c.tsv")
    assert res.grammar.start == "S" and "new york" in res.compounds
