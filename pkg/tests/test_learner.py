import itertools
import math

import pytest

from invlambda.ccg import cky_parse, compose_semantics, load_catlex, parse_category
from invlambda.chart import build_chart
from invlambda.lexicon import Lexicon, Provenance, entry
from invlambda.learner import (Model, TrainConfig, TrainingExample, extract_by_inverse,
                               generalize_mass, generalize_on_demand, gradient, learn,
                               log_likelihood, parse_best, prepare, trivial_entries,
                               update_params)
from invlambda.terms import alpha_equiv, canonical, parse_term, render_term

from conftest import ARKANSAS_LF

P = parse_term
TOKENS = ["Name", "the", "rivers", "in", "Mississippi"]


def terms(entries):
    return {render_term(e.semantics) for e in entries}


def test_generalize_on_demand_swaps_the_word_constant():
    lex = Lexicon([entry("fly", r"S\NP", r"\x. fly(x)")])
    (got,) = generalize_on_demand(lex, "swim", parse_category(r"S\NP"))
    assert render_term(got.semantics) == r"\x. swim(x)"
    assert got.provenance is Provenance.GENERALIZED


def test_generalize_on_demand_uses_vocabulary():
    lex = Lexicon([entry("Texas", "N", "stateid('texas')")])
    (got,) = generalize_on_demand(lex, "Utah", parse_category("N"), {"'utah'", "'texas'"})
    assert render_term(got.semantics) == "stateid('utah')"


def test_generalize_needs_same_category():
    lex = Lexicon([entry("fly", r"S\NP", r"\x. fly(x)")])
    assert generalize_on_demand(lex, "swim", parse_category("N")) == []


def test_generalize_mass_fills_only_missing_pairs():
    lex = Lexicon([entry("Texas", "N", "stateid('texas')"), entry("Ohio", "N", "'ohio'")])
    out = generalize_mass(lex, load_catlex("texas\tN\nohio\tN\nutah\tN\n"))
    assert terms(out.entries_for("utah")) == {"stateid('utah')", "'utah'"}
    assert terms(out.entries_for("ohio")) == {"'ohio'"}


def test_trivial_entries():
    cat = parse_category("NP/NP")
    got = trivial_entries("the", cat)
    assert terms(got) == {r"\x. x", r"\x. \y. y @ x"}
    assert trivial_entries("the", cat, Lexicon([entry("the", cat, r"\x. x")])) == []


def test_extract_in(arkansas_tree, arkansas_lexicon):
    lex = Lexicon(e for e in arkansas_lexicon if e.phrase != "in")
    found = extract_by_inverse(arkansas_tree, P(ARKANSAS_LF), lex)
    ins = [e for e in found if e.phrase == "in"]
    assert ins and alpha_equiv(ins[0].semantics, P(r"\x. \y. y @ loc_2(x)"))
    assert all(e.provenance is Provenance.INVERSE for e in found)


def test_extract_top_word(arkansas_tree, arkansas_lexicon):
    lex = Lexicon(e for e in arkansas_lexicon if e.phrase != "name")
    found = [e for e in extract_by_inverse(arkansas_tree, P(ARKANSAS_LF), lex)
             if e.phrase == "name"]
    assert [render_term(e.semantics) for e in found] == [r"\x. answer(x)"]


def test_extract_with_only_name_cannot_fix_in(arkansas_tree):
    lex = Lexicon([entry("Name", "S/NP", r"\x. answer(x)")])
    found = extract_by_inverse(arkansas_tree, P(ARKANSAS_LF), lex)
    assert not [e for e in found if e.phrase == "in"]


def mississippi_lexicon():
    return Lexicon([
        entry("Name", "S/NP", r"\x. answer(x)", 0.1),
        entry("the", "NP/NP", r"\x. x", 0.1),
        entry("the", "NP/NP", r"\x. \y. y @ x", 0.0),
        entry("rivers", "N", r"\x. river(x)", 0.1),
        entry("in", r"(NP\N)/N", r"\x. \y. y @ loc_2(x)", 0.1),
        entry("Mississippi", "N", "stateid('mississippi')", 0.1),
        entry("Mississippi", "N", "riverid('mississippi')", 0.5),
    ])


def brute_force(tokens, lex, theta):
    """Probability of each root meaning by enumerating every derivation."""
    catlex = {}
    for e in lex:
        catlex.setdefault(e.phrase, []).append(e.category)
    scores = {}
    for tree in cky_parse(tokens, catlex):
        for comp in compose_semantics(tree, lex):
            s = sum(theta[e.key] for e in comp.entries)
            key = canonical(comp.term)
            scores[key] = scores.get(key, 0.0) + math.exp(s)
    z = sum(scores.values())
    return {k: v / z for k, v in scores.items()}


def test_chart_probabilities_match_enumeration():
    lex = mississippi_lexicon()
    model = Model(lex)
    want = brute_force(TOKENS, lex, model.theta)
    ch = build_chart(tuple(TOKENS), lex, None)
    z = ch.log_partition()
    got = {it.term: math.exp(it.logz - z) for it in ch.roots()}
    assert set(got) == set(want)
    for k in want:
        assert got[k] == pytest.approx(want[k], rel=1e-9)
    assert sum(got.values()) == pytest.approx(1.0)


def test_parse_best_skips_ungrammatical_meanings(geo):
    model = Model(mississippi_lexicon())
    raw = parse_best(TOKENS, model)
    assert "riverid" in render_term(raw.term)
    best = parse_best(TOKENS, model, geo.grammar)
    assert render_term(best.term) == "answer(river(loc_2(stateid('mississippi'))))"
    assert 0.0 < best.probability < raw.probability


def test_parse_best_no_parse():
    model = Model(mississippi_lexicon())
    assert parse_best(["unknown"], model) is None
    assert parse_best([], model) is None


def test_update_prefers_the_gold_entry():
    lex = mississippi_lexicon()
    model = Model(lex, config=TrainConfig(iterations=1))
    gold = P("answer(river(loc_2(stateid('mississippi'))))")
    before = log_likelihood(model, [(TOKENS, gold)])
    state = ("mississippi", "N", "stateid('mississippi')")
    river = ("mississippi", "N", "riverid('mississippi')")
    t_state, t_river = model.theta[state], model.theta[river]
    update_params(model, [(tuple(TOKENS), gold)])
    assert model.theta[state] > t_state and model.theta[river] < t_river
    assert log_likelihood(model, [(TOKENS, gold)]) > before
    assert model.iteration == 1


def test_gradient_sums_to_zero_over_a_competing_pair():
    model = Model(mississippi_lexicon())
    g = gradient(model, tuple(TOKENS), P("answer(river(loc_2(stateid('mississippi'))))"))
    pair = g[("mississippi", "N", "stateid('mississippi')")] + \
        g[("mississippi", "N", "riverid('mississippi')")]
    assert pair == pytest.approx(0.0, abs=1e-12)


def test_learning_rate_schedule():
    cfg = TrainConfig()
    assert cfg.rate(0) == pytest.approx(0.1)
    assert cfg.rate(1000) == pytest.approx(0.05)


def test_model_round_trip():
    model = Model(mississippi_lexicon(), iteration=3, config=TrainConfig(iterations=4))
    back = Model.load(model.dump())
    assert back.lexicon == model.lexicon and back.theta == model.theta
    assert back.iteration == 3 and back.config == model.config
    with pytest.raises(ValueError):
        Model.load("phrase\tcategory\n")


def test_learn_empty_corpus():
    lex = mississippi_lexicon()
    model = learn([], lex, TrainConfig(iterations=2))
    assert model.lexicon == lex and model.iteration == 0


def _examples(geo, pairs):
    return prepare(pairs, geo.catlex, geo.compounds)


def test_learn_acquires_in_and_of(geo):
    seed = Lexicon([
        entry("Name", "S/NP", r"\x. answer(x)"),
        entry("the", "NP/NP", r"\x. x"),
        entry("all", "NP/NP", r"\x. x"),
        entry("rivers", "N", r"\x. river(x)"),
        entry("lakes", "N", r"\x. lake(x)"),
        entry("Arkansas", "N", "stateid('arkansas')"),
        entry("USA", "N", "countryid('usa')"),
    ])
    pairs = [("Name the rivers in Arkansas .", ARKANSAS_LF),
             ("Name all the lakes of USA .", "answer(lake(loc_2(countryid('usa'))))")]
    model = learn(_examples(geo, pairs), seed, TrainConfig(iterations=2), geo.catlex)
    assert model.lexicon.entries_for("in") and model.lexicon.entries_for("of")
    assert all(seed_entry in model.lexicon for seed_entry in seed)
    for sentence, lf in pairs:
        tokens = [t for t in sentence.split()]
        best = parse_best(tokens, model, geo.grammar)
        assert best is not None and render_term(best.term) == lf


def test_lexicon_grows_monotonically(geo, geo_corpus):
    pairs = [(e.sentence, e.lf) for e in geo_corpus][:8]
    from invlambda.estimator import induce_lexicon
    lex = induce_lexicon(pairs, geo)
    ex = _examples(geo, pairs)
    sizes = [len(lex)]
    prev = lex
    for it in (1, 2):
        model = learn(ex, lex, TrainConfig(iterations=it, generalize=False), None)
        assert all(e in model.lexicon for e in prev)
        sizes.append(len(model.lexicon))
        prev = model.lexicon
    assert sizes == sorted(sizes)


def test_training_example_keeps_tokens(geo):
    (ex,) = _examples(geo, [("Give me the cities in New York .",
                             "answer(city(loc_2(stateid('new york'))))")])
    assert isinstance(ex, TrainingExample)
    assert "New York" in ex.tokens and ex.trees
