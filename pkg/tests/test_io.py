import pytest

from invlambda.corpus import CorpusFormatError, Example, dump_corpus, load_corpus
from invlambda.ccg import parse_category
from invlambda.lexicon import Lexicon, LexiconEntry, Provenance, dump_lexicon, entry, load_lexicon
from invlambda.terms import Var


def test_corpus_round_trip(geo_corpus):
    assert load_corpus(dump_corpus(geo_corpus)) == geo_corpus
    assert geo_corpus[0] == Example("Name the rivers in Arkansas .",
                                    "answer(river(loc_2(stateid('arkansas'))))")


@pytest.mark.parametrize("text", ["S: a\n", "S: a\nS: b\nL: x\n", "Q: a\nL: x\n"])
def test_corpus_format_errors(text):
    with pytest.raises(CorpusFormatError):
        load_corpus(text)


def test_lexicon_round_trip(arkansas_lexicon):
    text = dump_lexicon(arkansas_lexicon)
    assert text.splitlines()[0].startswith("phrase\t")
    back = load_lexicon(text)
    assert back == arkansas_lexicon
    assert dump_lexicon(back) == text


def test_lexicon_weights_and_provenance():
    lex = load_lexicon("in\t(NP\\N)/N\t\\x. \\y. y @ loc_2(x)\t0.25\tinverse\n")
    (e,) = lex
    assert e.weight == 0.25 and e.provenance is Provenance.INVERSE
    assert e.phrase == "in"


def test_lexicon_rejects_open_terms_and_short_rows():
    with pytest.raises(ValueError):
        LexiconEntry("x", parse_category("N"), Var("y"))
    with pytest.raises(ValueError):
        load_lexicon("only\ttwo\n")


def test_lexicon_is_a_set():
    lex = Lexicon([entry("The", "NP/NP", r"\x. x"), entry("the", "NP/NP", r"\y. y")])
    assert len(lex) == 1
    assert lex.entries_for("THE")
