import pytest
from hypothesis import given, settings

from alccat.harness import GenConfig, generate
from alccat.semantics import BudgetExceeded, find_model
from alccat.syntax import BOT, Name, Not, canonicalize, nnf
from alccat.tableau import (
    RULE_ORDER, check_labels, check_p1, check_p2, decide_sat, entails, init_tableau, step,
)
from support import EMPTY, P, concepts, onto


def root_label(mt):
    return set(mt.nodes[0].tree.root.label)


@pytest.mark.parametrize("c, o, label", [
    ("A", EMPTY, {"A"}),
    ("(and A B)", EMPTY, {"(and A B)"}),
    ("A", onto(("A", "B")), {"A"}),
])
def test_init(c, o, label):
    mt = init_tableau(P(c), o)
    assert len(mt.nodes) == 1
    assert root_label(mt) == {canonicalize(P(x)) for x in label}


def test_and_rule_then_clash():
    mt = init_tableau(P("(and A (not A))"), EMPTY)
    step(mt)
    assert root_label(mt) == {canonicalize(P("(and A (not A))")), P("A"), P("(not A)")}
    leaf = mt.nodes[0]
    assert leaf.status == "clashed" and leaf.tree.clash.kind == "complement"
    assert not mt.open_leaves


def test_exists_forall_clash():
    c = P("(and (some R A) (all R (not A)))")
    v = decide_sat(c, EMPTY)
    assert not v.satisfiable
    rules = [e.rule for e in v.meta_tree.trace]
    assert rules == ["and", "exists", "forall"]
    tree = v.meta_tree.nodes[0].tree
    assert tree.clash.node == 1 and set(tree.nodes[1].label) == {P("A"), P("(not A)")}
    assert find_model(c, EMPTY, 3) is None


@pytest.mark.parametrize("c, o, sat", [
    ("(and A (not A))", EMPTY, False),
    ("A", onto(("A", "bot")), False),
    ("(or A B)", onto(("A", "bot"), ("B", "bot")), False),
    ("A", EMPTY, True),
    ("bot", EMPTY, False),
    ("top", onto(("top", "(some R A)")), True),
    ("A", onto(("A", "(some R A)")), True),
    ("(some R A)", onto(("A", "(all R (not A))"), ("top", "(some R top)")), True),
])
def test_decide_sat(c, o, sat):
    v = decide_sat(P(c), o)
    assert v.satisfiable is sat
    full = decide_sat(P(c), o, exhaustive=True, prune=False)
    assert full.satisfiable is sat


def test_both_disjuncts_refuted():
    v = decide_sat(P("(or A B)"), onto(("A", "bot"), ("B", "bot")), prune=False)
    leaves = v.meta_tree.leaves()
    assert len(leaves) >= 2 and all(m.status == "clashed" for m in leaves)


def test_blocking_terminates_on_cyclic_axiom():
    v = decide_sat(P("A"), onto(("A", "(some R A)")), exhaustive=True)
    assert v.satisfiable
    tree = v.witness_tree
    blocked = [n.id for n in tree.nodes if tree.blocked(n.id) is not None]
    assert blocked
    assert find_model(P("A"), onto(("A", "(some R A)")), 1) is not None


def test_entails():
    assert entails(EMPTY, P("A"), P("A"))
    assert entails(onto(("A", "B"), ("B", "C")), P("A"), P("C"))
    assert not entails(EMPTY, P("A"), P("B"))


def test_budget():
    o = onto(("top", "(and (or A B) (or B C))"), ("top", "(or (some R A) (some S B))"))
    with pytest.raises(BudgetExceeded):
        decide_sat(P("(and (some R C) (some S C))"), o, exhaustive=True, prune=False,
                   max_trees=4)


def test_rule_order_is_fixed():
    assert RULE_ORDER == ("subsume", "and", "forall", "or", "exists")
    v = decide_sat(P("(and (or A B) (some R C))"), onto(("C", "(not A)")), exhaustive=True)
    first = {}
    for e in v.meta_tree.trace:
        first.setdefault(e.tree, []).append(e.rule)
    # in the root tree the and-rule precedes the first split
    assert first[0][:2] == ["subsume", "and"]


@settings(max_examples=80, deadline=None)
@given(concepts(max_leaves=7))
def test_verdict_matches_models_and_full_expansion(c):
    o = onto(("A", "(some R (not B))"), ("(and B C)", "bot"))
    v = decide_sat(c, o)
    mt = v.meta_tree
    assert check_p1(mt) and check_p2(mt) and check_labels(mt)
    assert decide_sat(c, o, prune=False).satisfiable is v.satisfiable
    if find_model(c, o, 2) is not None:
        assert v.satisfiable
    if v.satisfiable:
        assert v.witness_tree.clash is None


def test_properties_on_generated_corpus():
    for inst in generate(GenConfig(seed=3, count=60)):
        v = decide_sat(inst.concept, inst.ontology)
        assert check_p1(v.meta_tree) and check_p2(v.meta_tree) and check_labels(v.meta_tree)
        if not v.satisfiable:
            assert all(m.status in ("clashed", "pruned") for m in v.meta_tree.leaves())


def test_verdict_on_nnf_equals_raw():
    c = Not(P("(or A (some R B))"))
    assert decide_sat(c, EMPTY).satisfiable == decide_sat(nnf(c), EMPTY).satisfiable
    assert decide_sat(BOT, EMPTY).satisfiable is False
    assert decide_sat(Name("A"), EMPTY).satisfiable is True
