import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from invlambda.ccg import leaf, load_derivation, node  # noqa: E402
from invlambda.corpus import bundled, load_corpus  # noqa: E402
from invlambda.estimator import Resources  # noqa: E402
from invlambda.lexicon import Lexicon, entry  # noqa: E402

ARKANSAS_LF = "answer(river(loc_2(stateid('arkansas'))))"

ARKANSAS_DERIVATION = r"""
(fa S (lex S/NP Name)
      (fa NP (lex NP/NP the)
             (ba NP (lex N rivers)
                    (fa NP\N (lex (NP\N)/N in) (lex N Arkansas)))))
"""


@pytest.fixture(scope="session")
def geo():
    return Resources.bundled("geo")


@pytest.fixture(scope="session")
def clang():
    return Resources.bundled("clang")


@pytest.fixture(scope="session")
def geo_corpus():
    return load_corpus(bundled("geo/corpus.txt"))


@pytest.fixture(scope="session")
def clang_corpus():
    return load_corpus(bundled("clang/corpus.txt"))


@pytest.fixture
def arkansas_tree():
    return load_derivation(ARKANSAS_DERIVATION)


@pytest.fixture
def arkansas_lexicon():
    return Lexicon([
        entry("Name", "S/NP", r"\x. answer(x)"),
        entry("the", "NP/NP", r"\x. x"),
        entry("rivers", "N", r"\x. river(x)"),
        entry("in", r"(NP\N)/N", r"\x. \y. y @ loc_2(x)"),
        entry("Arkansas", "N", "stateid('arkansas')"),
    ])


def balanced_tree():
    """((a b) (c d)): every word sits at level 2."""
    return node(node(leaf("(S/N)/N", "a"), leaf("N", "b")),
                node(leaf("N/N", "c"), leaf("N", "d")))


def pytest_terminal_summary(terminalreporter):
    from verdicts import VERDICTS
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        ok, text = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}")
