"""Corpus files: blocks of ``S: sentence`` / ``L: logical form`` lines."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Example:
    sentence: str
    lf: str


def load_corpus(text: str) -> list[Example]:
    out: list[Example] = []
    sentence = lf = None
    for lineno, raw in enumerate(text.splitlines() + [""], 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            if sentence is not None or lf is not None:
                if sentence is None or lf is None:
                    raise CorpusFormatError(f"line {lineno}: block needs both S: and L:")
                out.append(Example(sentence, lf))
                sentence = lf = None
            continue
        tag, sep, body = line.partition(":")
        if not sep or tag.strip() not in ("S", "L"):
            raise CorpusFormatError(f"line {lineno}: expected 'S:' or 'L:'")
        if tag.strip() == "S":
            if sentence is not None:
                raise CorpusFormatError(f"line {lineno}: second S: in one block")
            sentence = body.strip()
        else:
            if lf is not None:
                raise CorpusFormatError(f"line {lineno}: second L: in one block")
            lf = body.strip()
    return out


def dump_corpus(examples) -> str:
    return "\n".join(f"S: {e.sentence}\nL: {e.lf}\n" for e in examples)


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def bundled(name: str) -> str:
    """Text of a data file shipped with the package, e.g. ``geo/funql.cfg``."""
    return resources.files("invlambda").joinpath("data", name).read_text(encoding="utf-8")
