import pytest
from hypothesis import given, settings

from alccat.semantics import (
    BudgetExceeded, Interpretation, enumerate_interpretations, eval_concept, find_model,
    is_model_witness, satisfies,
)
from alccat.syntax import Not, Or, nnf
from support import EMPTY, P, concepts, onto


def interp(n, concepts=None, roles=None):
    return Interpretation(n, {k: frozenset(v) for k, v in (concepts or {}).items()},
                          {k: frozenset(v) for k, v in (roles or {}).items()})


def test_eval_connectives():
    i = interp(3, {"A": {0, 1}, "B": {1, 2}}, {"R": {(0, 1), (1, 2)}})
    ev = lambda s: set(eval_concept(P(s), i))
    assert ev("(and A B)") == {1}
    assert ev("(or A B)") == {0, 1, 2}
    assert ev("(not A)") == {2}
    assert ev("(some R B)") == {0, 1}
    assert ev("(all R B)") == {0, 1, 2}
    assert ev("(all R A)") == {0, 2}
    assert ev("top") == {0, 1, 2} and ev("bot") == set()


def test_satisfies_examples():
    o = onto(("A", "B"))
    assert satisfies(o, interp(2, {"A": {0}, "B": {0, 1}}))
    assert not satisfies(o, interp(2, {"A": {0}, "B": set()}))
    assert satisfies(EMPTY, interp(1))


def test_interpretation_bounds_and_json():
    with pytest.raises(ValueError):
        interp(0)
    with pytest.raises(ValueError):
        interp(1, {"A": {1}})
    i = interp(2, {"A": {1}}, {"R": {(0, 1)}})
    assert Interpretation.from_json(i.to_json()) == i


def test_find_model_examples():
    assert find_model(P("(and A (not A))"), EMPTY, 3) is None
    m = find_model(P("A"), onto(("A", "B")), 1)
    assert m.domain_size == 1 and m.concept_ext["A"] == {0} and m.concept_ext["B"] == {0}
    c = P("(and (some R A) (all R B))")
    m = find_model(c, EMPTY, 2)
    assert is_model_witness(c, EMPTY, m)
    # a two-element witness exists as well
    two = interp(2, {"A": {1}, "B": {1}}, {"R": {(0, 1)}})
    assert is_model_witness(c, EMPTY, two)


def test_find_model_budget():
    c = P("(and (some R (and A (some S B))) (all R (some S (not B))))")
    with pytest.raises(BudgetExceeded):
        find_model(c, onto(("A", "(some R C)")), 3, cap=5)


@settings(max_examples=40, deadline=None)
@given(concepts(max_leaves=5, names=("A", "B"), roles=("R",)))
def test_find_model_agrees_with_enumeration(c):
    o = onto(("A", "(or B (some R A))"))
    brute = any(satisfies(o, i) and eval_concept(c, i)
                for n in (1, 2) for i in enumerate_interpretations(["A", "B", "C"], ["R", "S"], n))
    m = find_model(c, o, 2)
    assert (m is not None) == brute
    if m is not None:
        assert is_model_witness(c, o, m)


def test_negation_is_complement():
    i = interp(2, {"A": {0}}, {"R": {(1, 0)}})
    c = P("(some R A)")
    assert eval_concept(Not(c), i) == i.domain - eval_concept(c, i)
    assert eval_concept(nnf(Not(c)), i) == eval_concept(Not(c), i)
    assert eval_concept(Or(c, Not(c)), i) == i.domain
