"""Shared fixtures: concept strategies, the worked example categories and the
per-lemma universes."""
from __future__ import annotations

from hypothesis import strategies as st

from alccat.category import category_of
from alccat.syntax import (
    BOT, TOP, GCI, And, Exists, Forall, Name, Not, Ontology, Or, Signature,
    _children, canonicalize, parse_concept,
)

SIG = Signature(("A", "B", "C"), ("R", "S"))
P = parse_concept


def onto(*axioms: tuple[str, str], sig: Signature = SIG) -> Ontology:
    return Ontology(sig, tuple(GCI(P(l, sig), P(r, sig)) for l, r in axioms))


EMPTY = onto()


def concepts(max_leaves: int = 8, names=("A", "B", "C"), roles=("R", "S")):
    atoms = st.sampled_from([Name(n) for n in names] + [TOP, BOT])

    def extend(inner):
        role = st.sampled_from(roles)
        return st.one_of(
            inner.map(Not),
            st.builds(And, inner, inner),
            st.builds(Or, inner, inner),
            st.builds(Exists, role, inner),
            st.builds(Forall, role, inner),
        )

    return st.recursive(atoms, extend, max_leaves=max_leaves)


# -- worked example categories --------------------------------------------------

MEETING = ["arrived", "filled-room", "starting", "started", "finished"]
MEETING_ARROWS = [("arrived", "filled-room"), ("arrived", "starting"), ("arrived", "started"),
                  ("filled-room", "finished"), ("starting", "finished"),
                  ("started", "finished")]


def meeting_category():
    states = [Name(s) for s in MEETING]
    return category_of(states, [(Name(a), Name(b)) for a, b in MEETING_ARROWS])


I, F, S, D, T = (Name(x) for x in "IFSDT")
D_OR_S = Or(D, S)
F_AND_D_OR_S = And(F, D_OR_S)
DISTRIBUTED = Or(And(F, D), And(F, S))


def distributivity_category():
    """Weak-conjunction counterexample: D ⊔ S ≅ T while F ⊓ D ≅ F ⊓ S ≅ I."""
    objs = [I, F, S, D, T, D_OR_S, And(F, D), And(F, S), F_AND_D_OR_S, DISTRIBUTED, And(F, T)]
    arrows = [
        (S, D_OR_S), (D, D_OR_S), (D_OR_S, T), (T, D_OR_S),
        (And(F, D), D), (And(F, D), F), (And(F, S), S), (And(F, S), F),
        (And(F, S), I), (I, And(F, S)), (And(F, D), I), (I, And(F, D)),
        (I, F), (I, S), (I, D), (F, T), (S, T), (D, T),
    ]
    return category_of(objs, arrows)


NNF_ = Not(Not(F))


def double_negation_category():
    objs = [F, Not(F), NNF_, Or(F, Not(F)), Or(Not(F), NNF_), And(F, Not(F)), And(Not(F), NNF_)]
    return category_of(objs)


# -- lemma universes --------------------------------------------------------------

# name: (objects the statement mentions, premise arrows, arrows to derive)
LEMMAS = {
    "double negation": (["A", "(not (not A))"], [],
                        [("A", "(not (not A))"), ("(not (not A))", "A")]),
    "contraposition": (["A", "B"], [("A", "B")], [("(not B)", "(not A)")]),
    "disjointness to negation": (["(and A B)"], [("(and A B)", "bot")], [("A", "(not B)")]),
    "negation to disjointness": (["(and A B)", "(not B)"], [("A", "(not B)")],
                                 [("(and A B)", "bot")]),
    "De Morgan over and": (["(not (and A B))", "(or (not A) (not B))"], [],
                           [("(not (and A B))", "(or (not A) (not B))"),
                            ("(or (not A) (not B))", "(not (and A B))")]),
    "De Morgan over or": (["(not (or A B))", "(and (not A) (not B))"], [],
                          [("(not (or A B))", "(and (not A) (not B))"),
                           ("(and (not A) (not B))", "(not (or A B))")]),
    "exists bottom": (["(some R bot)"], [], [("(some R bot)", "bot")]),
    "exists monotone": (["(some R A)", "(some R B)"], [("A", "B")],
                        [("(some R A)", "(some R B)")]),
    "forall meets exists-not": (["(and (all R A) (some R (not A)))"], [],
                                [("(and (all R A) (some R (not A)))", "bot")]),
    "forall monotone": (["(all R A)", "(all R B)", "(not (some R (not A)))",
                         "(not (some R (not B)))"], [("A", "B")],
                        [("(all R A)", "(all R B)")]),
    "exists meets forall": (["(and (some R A) (all R B))", "(some R (and A B))"], [],
                            [("(and (some R A) (all R B))", "(some R (and A B))")]),
}


def lemma_universe(texts: list[str]) -> list:
    """Subterms and their negations, plus every pairwise ⊓ and ⊔ of those."""
    found: dict = {}
    stack = [P(t) for t in texts]
    while stack:
        c = stack.pop()
        if c not in found:
            found[c] = None
            stack.extend(_children(c))
    base = list(dict.fromkeys(canonicalize(x) for x in [*found, *(Not(x) for x in found)]))
    out = list(base)
    for i, x in enumerate(base):
        for y in base[i:]:
            out += [And(x, y), Or(x, y)]
    return out


def lemma_category(name: str):
    objs, premises, _ = LEMMAS[name]
    texts = objs + [t for p in premises for t in p]
    return category_of(lemma_universe(texts), [(P(a), P(b)) for a, b in premises], close=True)
