import time

import pytest
from hypothesis import given, settings

from alccat.category import (
    FULL, MASKS, RULES, WEAK_CONJUNCTION, WEAK_NEGATION, NotInUniverse, UniverseConfig,
    build_universe, category_of, decide_cat_unsat, enable_rules, export_dot, has_arrow,
    saturate,
)
from alccat.objects import (
    AuxRole, BotRole, Cod, Dom, ExistsRole, NamedRole, TopRole, ref_from_json, ref_str,
    ref_to_json,
)
from alccat.semantics import BudgetExceeded
from alccat.syntax import BOT, TOP, And, Name, Not, Or, canonicalize
from alccat.tableau import entails
from support import (
    D_OR_S, DISTRIBUTED, EMPTY, F, F_AND_D_OR_S, I, LEMMAS, MEETING, NNF_, P, T, concepts,
    distributivity_category, double_negation_category, lemma_category, meeting_category, onto,
)


def derived_between(cat, objs):
    """Arrows among ``objs`` that no fixture edge put there."""
    out = set()
    for x in objs:
        for y in objs:
            if x != y and cat.has(x, y) and cat.tag(x, y) != "fixture":
                out.add((str(x), str(y)))
    return out


def test_meeting_transitivity():
    cat = saturate(meeting_category())
    states = [Name(s) for s in MEETING]
    assert derived_between(cat, states) == {("arrived", "finished")}
    assert not cat.has(Name("finished"), Name("arrived"))


def test_initial_and_terminal():
    cat = saturate(meeting_category())
    for x in cat.concept_objects():
        assert cat.has(BOT, x) and cat.has(x, TOP)
        assert has_arrow(cat, x, x)
    assert has_arrow(cat, BOT, Name("arrived"))


def test_weak_conjunction_counterexample():
    weak = saturate(enable_rules(distributivity_category(), "weak-conjunction"))
    assert weak.has(F_AND_D_OR_S, F) and weak.has(F, F_AND_D_OR_S)
    assert weak.has(D_OR_S, T) and weak.has(T, D_OR_S)
    assert weak.has(DISTRIBUTED, I) and weak.has(I, DISTRIBUTED)
    assert not weak.has(F, I)
    assert not weak.has(F_AND_D_OR_S, DISTRIBUTED)
    full = saturate(enable_rules(distributivity_category(), FULL))
    assert full.has(F_AND_D_OR_S, DISTRIBUTED)
    assert full.tag(F_AND_D_OR_S, DISTRIBUTED) == "distrib"


def test_weak_negation_counterexample():
    weak = saturate(enable_rules(double_negation_category(), WEAK_NEGATION))
    assert weak.has(And(F, Not(F)), BOT) and weak.has(TOP, Or(F, Not(F)))
    assert not weak.has(F, NNF_) and not weak.has(NNF_, F)
    full = saturate(double_negation_category())
    assert full.has(F, NNF_) and full.has(NNF_, F)


def test_masks():
    assert set(MASKS) >= {"full", "weak-conjunction", "weak-negation"}
    assert FULL == frozenset(RULES)
    assert "distrib" not in WEAK_CONJUNCTION
    assert not {"neg-max", "neg-min"} & WEAK_NEGATION
    with pytest.raises(ValueError):
        enable_rules(meeting_category(), {"no-such-rule"})


@pytest.mark.parametrize("name", sorted(LEMMAS))
def test_lemma_arrows(name):
    _, _, goals = LEMMAS[name]
    start = time.monotonic()
    cat = saturate(lemma_category(name))
    for a, b in goals:
        assert cat.has(P(a), P(b)), f"{name}: {a} -> {b}"
    assert time.monotonic() - start < 5


def test_universe_contents():
    cat = build_universe(P("A"), EMPTY)
    assert {TOP, BOT, P("A"), P("(not A)")} <= set(cat.concepts)
    cat = build_universe(P("A"), onto(("A", "B")))
    ax = canonicalize(P("(or (not A) B)"))
    assert ax in cat.concepts and cat.has(TOP, ax) and cat.tag(TOP, ax) == "axiom"
    cat = build_universe(P("(some R A)"), EMPTY)
    er = ExistsRole(P("(some R A)"))
    assert {NamedRole("R"), TopRole(), BotRole(), er} <= set(cat.roles)
    saturate(cat)
    assert cat.has_role_arrow(er, NamedRole("R"))
    assert cat.has(Dom(er), P("(some R A)")) and cat.has(P("(some R A)"), Dom(er))
    assert cat.has(Cod(er), P("A"))
    with pytest.raises(NotInUniverse):
        cat.has(P("(some S B)"), BOT)


def test_universe_budget():
    with pytest.raises(BudgetExceeded):
        build_universe(P("(and (some R A) (all R (or B C)))"), EMPTY,
                       UniverseConfig(max_objects=5))


@pytest.mark.parametrize("c, o, unsat", [
    ("(and A (not A))", EMPTY, True),
    ("A", EMPTY, False),
    ("A", onto(("A", "bot")), True),
    ("(or A B)", onto(("A", "bot"), ("B", "bot")), True),
    ("(and (some R A) (all R (not A)))", EMPTY, True),
    ("(and (some R A) (all R B))", onto(("B", "(not A)")), True),
    ("(some R A)", onto(("A", "(some R A)")), False),
])
def test_decide_cat_unsat(c, o, unsat):
    assert decide_cat_unsat(P(c), o, UniverseConfig(guided=True)) is unsat


def test_dot_export():
    minimal = export_dot(category_of([]))
    assert '[label="top"]' in minimal and '[label="bot"]' in minimal
    assert "n0 -> n1" in minimal
    cat = saturate(meeting_category())
    plain = export_dot(cat)
    dashed = export_dot(cat, derived=True)
    assert plain == export_dot(saturate(meeting_category()))
    for s in MEETING:
        assert f'label="{s}"' in plain
    assert "style=dashed" not in plain
    # the one derived edge among the states is arrived -> finished
    assert dashed.count("style=dashed") == 1
    assert "n0 -> n3 [style=dashed]" in dashed and 'n0 [label="arrived"]' in dashed
    assert 'n3 [label="finished"]' in dashed


def test_ref_json_round_trip():
    e = P("(some R A)")
    refs = [NamedRole("R"), TopRole(), BotRole(), ExistsRole(e),
            AuxRole(canonicalize(And(P("B"), e)), e), Dom(ExistsRole(e)), Cod(NamedRole("R")),
            canonicalize(P("(and B (not A))"))]
    for r in refs:
        assert ref_from_json(ref_to_json(r)) == r
        assert ref_str(r)


@settings(max_examples=40, deadline=None)
@given(concepts(max_leaves=6))
def test_saturated_arrows_are_entailed(c):
    o = onto(("A", "(all R B)"))
    cat = saturate(build_universe(c, o))
    objs = [x for x in cat.concept_objects() if x not in (TOP, BOT)]
    for x in objs[:6]:
        for y in objs[:6]:
            if cat.has(x, y):
                assert entails(o, x, y)
