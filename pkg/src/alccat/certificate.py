"""Refutation certificates: arrow derivations of ``C → ⊥`` read off a closed tableau.

A certificate is an ordered list of steps.  Each step introduces one arrow and
names the rule that justifies it together with the indices of earlier steps it
relies on.  :func:`extract_certificate` builds one from a meta tree whose
leaves are all clashed; :func:`check_certificate` re-validates a certificate
with its own rule matchers and never consults the category engine.

Notation used below: ``H(u)`` are the hypotheses of node ``u`` (label members
that came from the start concept, a parent's ∃/∀ or a ⊔ choice) and ``K(S)``
is the canonical right-nested conjunction of a set ``S``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .objects import (
    AuxRole, BotRole, Cod, Dom, ExistsRole, NamedRole, TopRole, cod, dom, is_role,
    ref_from_json, ref_str, ref_to_json,
)
from .syntax import (
    BOT, TOP, And, Concept, Exists, Forall, Name, Not, Ontology, Or,
    axiom_object, canonicalize, conj, flatten_and, nnf, print_concept, sub_closure,
)
from .tableau import RULE_ORDER, CompletionTree, MetaTree

PRIMITIVE_RULES = (
    "identity", "initial", "terminal", "compose", "axiom",
    "disj-in", "disj-univ", "conj-out", "conj-univ", "distrib",
    "neg-bot", "neg-top", "neg-max", "neg-min",
    "exists-role", "exists-cod", "exists-dom", "exists-univ",
    "forall-neg", "forall-univ", "aux-role", "aux-dom",
    "functor-dom", "functor-cod", "bot-role",
)
MACRO_RULES = ("exist-empty", "forall-exist")


class NoCertificate(ValueError):
    """The meta tree has a clash-free leaf (or is not finished)."""


@dataclass(frozen=True)
class CertStep:
    objects: tuple
    src: object
    dst: object
    rule: str
    premises: tuple = ()

    @property
    def arrow(self) -> tuple:
        return (self.src, self.dst)

    def to_json(self) -> dict:
        return {
            "objects": [print_concept(c) for c in self.objects],
            "arrow": [ref_to_json(self.src), ref_to_json(self.dst)],
            "rule": self.rule,
            "premises": list(self.premises),
        }

    @classmethod
    def from_json(cls, d: dict) -> "CertStep":
        src, dst = d["arrow"]
        return cls(tuple(ref_from_json(c) for c in d.get("objects", [])),
                   ref_from_json(src), ref_from_json(dst), d["rule"],
                   tuple(d.get("premises", [])))

    def __str__(self) -> str:
        prem = f" <- {list(self.premises)}" if self.premises else ""
        return f"{ref_str(self.src)} -> {ref_str(self.dst)}  [{self.rule}]{prem}"


@dataclass
class Certificate:
    concept: Concept
    ontology_hash: str
    steps: list = field(default_factory=list)

    @property
    def final(self) -> Optional[tuple]:
        return self.steps[-1].arrow if self.steps else None

    def concepts(self) -> list:
        """Every concept mentioned by the certificate, including role payloads."""
        seen: dict = {self.concept: None}
        for s in self.steps:
            for ref in (s.src, s.dst, *s.objects):
                for c in _ref_concepts(ref):
                    seen[c] = None
        return list(seen)

    def introduced(self) -> list:
        out: dict = {}
        for s in self.steps:
            for c in s.objects:
                out[c] = None
        return list(out)

    def to_json(self) -> dict:
        return {"concept": print_concept(self.concept), "ontology_hash": self.ontology_hash,
                "steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        return cls(canonicalize(ref_from_json(d["concept"])), d["ontology_hash"],
                   [CertStep.from_json(s) for s in d["steps"]])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def loads(cls, text: str) -> "Certificate":
        return cls.from_json(json.loads(text))


def _ref_concepts(ref) -> list:
    if isinstance(ref, (Dom, Cod)):
        return _ref_concepts(ref.role)
    if isinstance(ref, ExistsRole):
        return [ref.restriction]
    if isinstance(ref, AuxRole):
        return [ref.conj, ref.restriction]
    if isinstance(ref, (NamedRole, TopRole, BotRole)):
        return []
    return [ref]


def base_objects(c0: Concept, o: Ontology) -> set:
    """Concepts a certificate may use without introducing them."""
    c = canonicalize(nnf(c0))
    out = {c, TOP, BOT}
    out.update(axiom_object(ax) for ax in o.axioms)
    out.update(sub_closure(c0, o))
    out.update(canonicalize(Not(x)) for x in list(out))
    return out


# -- extraction -----------------------------------------------------------------

@dataclass
class _Ref:
    """A refutation ``K(hyps) → ⊥`` attached to node ``node`` of ``tree``."""
    tree: CompletionTree
    node: int
    hyps: frozenset
    idx: int


_HYP_RULES = ("init", "exists", "forall", "or")


class _Builder:
    def __init__(self):
        self.steps: list[tuple] = []  # (src, dst, rule, premises)
        self.index: dict = {}

    def arrow(self, i: int) -> tuple:
        s = self.steps[i]
        return s[0], s[1]

    def add(self, src, dst, rule: str, premises=()) -> int:
        key = (src, dst)
        if key in self.index:
            return self.index[key]
        self.steps.append((src, dst, rule, tuple(premises)))
        self.index[key] = len(self.steps) - 1
        return len(self.steps) - 1

    def compose(self, i: int, j: int) -> int:
        a, b = self.arrow(i)
        b2, c = self.arrow(j)
        assert b == b2, (ref_str(b), ref_str(b2))
        if a == b:
            return j
        if b == c:
            return i
        return self.add(a, c, "compose", (i, j))

    def identity(self, x) -> int:
        return self.add(x, x, "identity")


class _Extractor:
    def __init__(self, mt: MetaTree, strict: bool):
        self.mt = mt
        self.strict = strict
        self.b = _Builder()
        self.memo: dict = {}
        self.need: dict = {}

    def needed(self, tree: CompletionTree, u: int, y: Concept) -> frozenset:
        """Hypotheses of ``u`` that the label member ``y`` was derived from."""
        key = (id(tree), u, y)
        out = self.need.get(key)
        if out is None:
            rule, trig = tree.nodes[u].label[y]
            if rule in _HYP_RULES:
                out = frozenset({y})
            elif rule == "axiom":
                out = frozenset()
            else:
                out = self.needed(tree, u, trig)
            self.need[key] = out
        return out

    def replay(self, tree: CompletionTree, u: int, y: Concept, src: frozenset) -> int:
        """K(src) → y, for a label member y whose needed hypotheses lie in src."""
        key = (id(tree), u, y, src)
        if key in self.memo:
            return self.memo[key]
        b = self.b
        rule, trig = tree.nodes[u].label[y]
        if rule in _HYP_RULES:
            out = self.project(src, y)
        elif rule == "axiom":
            out = b.compose(b.add(conj(src), TOP, "terminal"), b.add(TOP, y, "axiom"))
        else:
            out = b.compose(self.replay(tree, u, trig, src), b.add(trig, y, "conj-out"))
        self.memo[key] = out
        return out

    def project(self, src, y: Concept) -> int:
        """K(src) → y for y in src."""
        b = self.b
        items = sorted(src, key=print_concept)
        j = items.index(y)
        cur = conj(items)
        out = b.identity(cur)
        for i in range(j):
            nxt = conj(items[i + 1:])
            out = b.compose(out, b.add(cur, nxt, "conj-out"))
            cur = nxt
        if cur != y:
            out = b.compose(out, b.add(cur, y, "conj-out"))
        return out

    def intro(self, x, parts: dict) -> int:
        """x → K(parts) from arrows x → p (``parts`` maps p to a step index)."""
        items = sorted(parts, key=print_concept)
        if not items:
            return self.b.add(x, TOP, "terminal")
        if len(items) == 1:
            return parts[items[0]]
        k = conj(items)
        rest = self.intro(x, {p: parts[p] for p in items[1:]})
        first = parts[items[0]]
        prem = (first, rest) if k.left == items[0] else (rest, first)
        return self.b.add(x, k, "conj-univ", prem)

    def weaken(self, big: frozenset, small: frozenset) -> int:
        """K(big) → K(small) for small ⊆ big."""
        return self.intro(conj(big), {h: self.project(big, h) for h in small})

    # clash at a leaf tree
    def leaf(self, tree: CompletionTree) -> _Ref:
        b = self.b
        clash = tree.clash
        u = clash.node
        if clash.kind == "bot":
            src = self.needed(tree, u, BOT)
            idx = self.replay(tree, u, BOT, src)
        else:
            a = Name(clash.name)
            na = Not(a)
            src = self.needed(tree, u, a) | self.needed(tree, u, na)
            pair = canonicalize(And(a, na))
            ia, ina = self.replay(tree, u, a, src), self.replay(tree, u, na, src)
            prem = (ia, ina) if pair.left == a else (ina, ia)
            idx = b.compose(b.add(conj(src), pair, "conj-univ", prem),
                            b.add(pair, BOT, "neg-bot"))
        return _Ref(tree, u, src, idx)

    def propagate(self, ref: _Ref) -> _Ref:
        tree = ref.tree
        while True:
            node = tree.nodes[ref.node]
            if node.parent is None:
                return ref
            if any(node.label[h][0] == "or" for h in ref.hyps):
                return ref
            ref = self.up(ref)

    def up(self, ref: _Ref) -> _Ref:
        """From K(S) → ⊥ at a node y to K(S') → ⊥ at its parent z."""
        b = self.b
        tree = ref.tree
        y = tree.nodes[ref.node]
        z = y.parent
        role = y.role
        ex = next(trig for rule, trig in y.label.values() if rule == "exists")
        assert ex.role == role
        alls = []
        for h in sorted(ref.hyps, key=print_concept):
            rule, trig = y.label[h]
            if rule == "forall":
                alls.append(trig)
        q = [ex] + alls
        p = conj(q)
        if not self.strict:
            full = frozenset([ex.filler] + [f.filler for f in alls])
            e = Exists(role, conj(full))
            first = b.add(p, e, "forall-exist") if alls else b.identity(p)
            body = b.compose(self.weaken(full, ref.hyps), ref.idx)
            pb = b.compose(first, b.add(e, BOT, "exist-empty", (body,)))
        else:
            pb = self._up_strict(ref, ex, alls, p)
        src = frozenset().union(*(self.needed(tree, z, c) for c in q))
        parts = {c: self.replay(tree, z, c, src) for c in q}
        kz_p = self.intro(conj(src), parts)
        return _Ref(tree, z, src, b.compose(kz_p, pb))

    def _up_strict(self, ref, ex: Exists, alls: list, p: Concept) -> int:
        b = self.b
        er = ExistsRole(ex)
        d = ex.filler
        parts = {}
        if not alls:
            rho = er
            if d in ref.hyps:
                parts[d] = b.add(Cod(er), d, "exists-cod")
            dom_rule = "exists-dom"
        else:
            rho = AuxRole(p, ex)
            r1 = b.add(rho, er, "aux-role")
            if d in ref.hyps:
                parts[d] = b.compose(b.add(Cod(rho), Cod(er), "functor-cod", (r1,)),
                                     b.add(Cod(er), d, "exists-cod"))
            rr = b.compose(r1, b.add(er, NamedRole(ex.role), "exists-role"))
            d1 = b.add(Dom(rho), p, "aux-dom")
            q = frozenset([ex] + alls)
            for f in alls:
                dd = b.compose(d1, self.project(q, f))
                parts[f.filler] = b.add(Cod(rho), f.filler, "forall-univ", (rr, dd))
            dom_rule = "aux-dom"
        cb = b.compose(self.intro(Cod(rho), parts), ref.idx)
        rb = b.add(rho, BotRole(), "bot-role", (cb,))
        db = b.add(Dom(rho), BOT, "functor-dom", (rb,))
        return b.compose(b.add(p, Dom(rho), dom_rule), db)

    def refute(self, mid: int) -> _Ref:
        meta = self.mt.nodes[mid]
        if meta.status == "clashed":
            return self.propagate(self.leaf(meta.tree))
        if meta.status != "split":
            raise NoCertificate(f"tree {mid} is {meta.status}, not clashed")
        split = meta.split
        x = split.node
        kids = [self.mt.nodes[k] for k in meta.children]
        refs = []
        for kid, chosen in zip(kids, (split.left, split.right)):
            if kid.status == "pruned":
                refs.append(None)
                continue
            ref = self.refute(kid.id)
            if not (ref.node == x and chosen in ref.hyps):
                return ref  # the disjunct played no part
            refs.append(ref)
        if None in refs:
            raise AssertionError("pruned branch whose sibling used its disjunct")
        b = self.b
        tree = meta.tree
        disj = split.disjunction
        src = self.needed(tree, x, disj)
        for ref, chosen in zip(refs, (split.left, split.right)):
            src |= ref.hyps - {chosen}
        assert src <= frozenset(tree.hypotheses(x))
        w = conj(src)
        wd = canonicalize(And(w, disj))
        i_d, i_w = self.replay(tree, x, disj, src), b.identity(w)
        prem = (i_w, i_d) if wd.left == w and wd.right == disj else (i_d, i_w)
        total = b.add(w, wd, "conj-univ", prem)
        target = canonicalize(Or(And(w, split.left), And(w, split.right)))
        total = b.compose(total, b.add(wd, target, "distrib"))
        side = {}
        for ref, chosen in zip(refs, (split.left, split.right)):
            wc = canonicalize(And(w, chosen))
            parts = {}
            for h in ref.hyps:
                if h == chosen:
                    parts[h] = b.add(wc, chosen, "conj-out")
                else:
                    parts[h] = b.compose(b.add(wc, w, "conj-out"), self.project(src, h))
            side[wc] = b.compose(self.intro(wc, parts), ref.idx)
        prem = (side[target.left], side[target.right])
        total = b.compose(total, b.add(target, BOT, "disj-univ", prem))
        return self.propagate(_Ref(tree, x, src, total))


def extract_certificate(mt: MetaTree, c0: Concept, o: Ontology, strict: bool = True
                        ) -> Certificate:
    """Derivation of ``c0 → ⊥`` from a meta tree whose leaves are all clashed.

    With ``strict`` every step is a primitive rule instance; otherwise the
    ∃/∀ back-propagation uses the two lemma macros.
    """
    if tuple(mt.rule_order) != RULE_ORDER:
        raise NoCertificate("meta tree was built under a different rule order")
    c = canonicalize(nnf(c0))
    if c != mt.c0:
        raise ValueError("meta tree belongs to a different concept")
    for m in mt.leaves():
        if m.status not in ("clashed", "pruned"):
            raise NoCertificate("satisfiable: some leaf tree is clash-free or unfinished")
    cert = Certificate(c, o.digest())
    if c == BOT:
        return cert
    ex = _Extractor(mt, strict)
    ref = ex.refute(0)
    if not (ref.node == 0 and ref.hyps <= {c}):
        raise AssertionError("refutation did not reach the root")
    final = ex.b.compose(ex.weaken(frozenset({c}), ref.hyps), ref.idx)
    cert.steps = _prune(ex.b.steps, final, base_objects(c0, o))
    return cert


def _prune(raw: list, final: int, base: set) -> list:
    keep, todo = set(), [final]
    while todo:
        i = todo.pop()
        if i in keep:
            continue
        keep.add(i)
        todo.extend(raw[i][3])
    order = sorted(keep)
    new = {old: k for k, old in enumerate(order)}
    known = set(base)
    out = []
    for i in order:
        src, dst, rule, prem = raw[i]
        objs = []
        for ref in (src, dst):
            for c in _ref_concepts(ref):
                if c not in known:
                    known.add(c)
                    objs.append(c)
        out.append(CertStep(tuple(objs), src, dst, rule, tuple(new[p] for p in prem)))
    return out


# -- checking -------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    ok: bool
    index: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "certificate accepted"
        where = "" if self.index is None else f" at step {self.index}"
        return f"certificate rejected{where}: {self.reason}"


class _Bad(Exception):
    pass


def _need(cond, reason: str) -> None:
    if not cond:
        raise _Bad(reason)


def _neg(c: Concept) -> Concept:
    return canonicalize(Not(c))


def _sides(c):
    return ((c.left, c.right), (c.right, c.left))


def _is_concept_side(ref) -> bool:
    return not is_role(ref)


def _valid_aux(r: AuxRole) -> bool:
    return isinstance(r.conj, And) and r.restriction in flatten_and(r.conj)


def _check_step(k: int, st: CertStep, prems: list, axioms: set, allow_macros: bool) -> None:
    s, t, rule = st.src, st.dst, st.rule
    role_arrow = is_role(s)
    _need(is_role(t) == role_arrow, "arrow mixes a role and a concept")
    for ref in (s, t):
        if isinstance(ref, AuxRole) or isinstance(ref, (Dom, Cod)) and isinstance(ref.role, AuxRole):
            _need(_valid_aux(ref if isinstance(ref, AuxRole) else ref.role),
                  "malformed auxiliary role")

    def arity(n):
        _need(len(prems) == n, f"{rule} takes {n} premise(s)")

    if rule == "identity":
        arity(0)
        _need(s == t, "identity needs equal ends")
    elif rule == "initial":
        arity(0)
        _need(s == (BotRole() if role_arrow else BOT), "source is not initial")
    elif rule == "terminal":
        arity(0)
        _need(t == (TopRole() if role_arrow else TOP), "target is not terminal")
    elif rule == "axiom":
        arity(0)
        _need(s == TOP and t in axioms, "not an axiom arrow")
    elif rule == "compose":
        arity(2)
        (a, b1), (b2, c) = prems
        _need(a == s and b1 == b2 and c == t, "premises do not compose to the arrow")
    elif rule == "disj-in":
        arity(0)
        _need(isinstance(t, Or) and s in (t.left, t.right), "not a disjunct injection")
    elif rule == "disj-univ":
        arity(2)
        _need(isinstance(s, Or), "source is not a disjunction")
        _need(prems[0] == (s.left, t) and prems[1] == (s.right, t), "premises do not match")
    elif rule == "conj-out":
        arity(0)
        _need(isinstance(s, And) and t in (s.left, s.right), "not a conjunct projection")
    elif rule == "conj-univ":
        arity(2)
        _need(isinstance(t, And), "target is not a conjunction")
        _need(prems[0] == (s, t.left) and prems[1] == (s, t.right), "premises do not match")
    elif rule == "distrib":
        arity(0)
        _need(isinstance(s, And), "source is not a conjunction")
        _need(any(isinstance(o, Or) and t == canonicalize(Or(And(c, o.left), And(c, o.right)))
                  for c, o in _sides(s)), "not a distributivity instance")
    elif rule == "neg-bot":
        arity(0)
        _need(t == BOT and isinstance(s, And) and any(x == _neg(y) for x, y in _sides(s)),
              "not C and not C")
    elif rule == "neg-top":
        arity(0)
        _need(s == TOP and isinstance(t, Or) and any(x == _neg(y) for x, y in _sides(t)),
              "not C or not C")
    elif rule == "neg-max":
        arity(1)
        a, bot = prems[0]
        _need(bot == BOT and isinstance(a, And), "premise is not a conjunction into bottom")
        _need(any(s == x and t == _neg(c) for c, x in _sides(a)), "conclusion does not match")
    elif rule == "neg-min":
        arity(1)
        top, o = prems[0]
        _need(top == TOP and isinstance(o, Or), "premise is not top into a disjunction")
        _need(any(s == _neg(c) and t == x for c, x in _sides(o)), "conclusion does not match")
    elif rule == "exists-role":
        arity(0)
        _need(isinstance(s, ExistsRole) and t == NamedRole(s.restriction.role),
              "not a restriction role arrow")
    elif rule == "exists-cod":
        arity(0)
        _need(isinstance(s, Cod) and isinstance(s.role, ExistsRole)
              and t == s.role.restriction.filler, "not a restriction codomain arrow")
    elif rule == "exists-dom":
        arity(0)
        _need(any(isinstance(a, Dom) and isinstance(a.role, ExistsRole)
                  and b == a.role.restriction for a, b in ((s, t), (t, s))),
              "not a restriction domain arrow")
    elif rule == "exists-univ":
        arity(2)
        (r1, named), (c1, f) = prems
        _need(is_role(r1) and isinstance(named, NamedRole), "first premise must reach a role name")
        _need(c1 == cod(r1) and s == dom(r1), "premises do not share the role")
        _need(t == Dom(ExistsRole(Exists(named.name, f))), "conclusion does not match")
    elif rule == "forall-neg":
        arity(0)
        _need(any(isinstance(a, Forall) and b == _neg(Exists(a.role, Not(a.filler)))
                  for a, b in ((s, t), (t, s))), "not a universal duality arrow")
    elif rule == "forall-univ":
        arity(2)
        (r1, named), (d1, f) = prems
        _need(is_role(r1) and isinstance(named, NamedRole), "first premise must reach a role name")
        _need(isinstance(f, Forall) and f.role == named.name, "second premise must reach a universal")
        _need(d1 == dom(r1) and s == cod(r1) and t == f.filler, "conclusion does not match")
    elif rule == "aux-role":
        arity(0)
        _need(isinstance(s, AuxRole) and t == ExistsRole(s.restriction), "not an auxiliary role arrow")
    elif rule == "aux-dom":
        arity(0)
        _need(any(isinstance(a, Dom) and isinstance(a.role, AuxRole) and b == a.role.conj
                  for a, b in ((s, t), (t, s))), "not an auxiliary domain arrow")
    elif rule in ("functor-dom", "functor-cod"):
        arity(1)
        r1, r2 = prems[0]
        _need(is_role(r1) and is_role(r2), "premise must be a role arrow")
        f = dom if rule == "functor-dom" else cod
        _need(s == f(r1) and t == f(r2), "conclusion does not match")
    elif rule == "bot-role":
        arity(1)
        c, bot = prems[0]
        _need(bot == BOT and role_arrow and t == BotRole(), "not a bottom role arrow")
        _need(c in (dom(s), cod(s)), "premise is not about this role")
    elif rule == "exist-empty" and allow_macros:
        arity(1)
        c, bot = prems[0]
        _need(bot == BOT and t == BOT and isinstance(s, Exists) and s.filler == c,
              "not an empty-filler instance")
    elif rule == "forall-exist" and allow_macros:
        arity(0)
        _need(isinstance(s, And) and isinstance(t, Exists), "shape mismatch")
        items = flatten_and(s)
        exs = [e for e in items if isinstance(e, Exists)]
        _need(len(exs) == 1 and exs[0].role == t.role, "needs exactly one existential")
        alls = [f for f in items if f is not exs[0]]
        _need(all(isinstance(f, Forall) and f.role == t.role for f in alls),
              "other conjuncts must be universals on the same role")
        _need(s == conj(items) and t.filler == conj([exs[0].filler] + [f.filler for f in alls]),
              "conclusion does not match")
    else:
        raise _Bad(f"unknown rule {rule!r}")


def check_certificate(cert: Certificate, c0: Concept, o: Ontology,
                      allow_macros: bool = True) -> CheckResult:
    """Validate every step of ``cert`` and that it ends in ``c0 → ⊥``."""
    c = canonicalize(nnf(c0))
    if cert.concept != c:
        return CheckResult(False, None, "certificate is for a different concept")
    if cert.ontology_hash != o.digest():
        return CheckResult(False, None, "ontology hash mismatch")
    axioms = {axiom_object(ax) for ax in o.axioms}
    known = base_objects(c0, o)
    arrows: list = []
    for k, st in enumerate(cert.steps):
        try:
            for p in st.premises:
                _need(isinstance(p, int) and 0 <= p < k, f"premise {p!r} does not precede the step")
            known.update(st.objects)
            for ref in (st.src, st.dst):
                for x in _ref_concepts(ref):
                    _need(x in known, f"object {print_concept(x)} was never introduced")
            _check_step(k, st, [arrows[p] for p in st.premises], axioms, allow_macros)
        except _Bad as e:
            return CheckResult(False, k, str(e))
        arrows.append(st.arrow)
    if not cert.steps:
        if c == BOT:
            return CheckResult(True)
        return CheckResult(False, None, "empty derivation")
    if cert.steps[-1].arrow != (c, BOT):
        return CheckResult(False, len(cert.steps) - 1, "final arrow is not concept -> bot")
    return CheckResult(True)


# -- mutation (negative controls) -------------------------------------------------

MUTATIONS = ("src", "dst", "rule", "premise")


def mutate_certificate(cert: Certificate, rng: random.Random, index: Optional[int] = None,
                       kind: Optional[str] = None) -> Certificate:
    """Copy of ``cert`` with exactly one step changed."""
    if not cert.steps:
        raise ValueError("nothing to mutate")
    k = rng.randrange(len(cert.steps)) if index is None else index
    st = cert.steps[k]
    kind = kind or rng.choice(MUTATIONS)
    pool = sorted({ref for s in cert.steps for ref in (s.src, s.dst)} | {TOP, BOT},
                  key=ref_str)
    if kind in ("src", "dst"):
        cur = st.src if kind == "src" else st.dst
        same_kind = [r for r in pool if is_role(r) == is_role(cur) and r != cur]
        if not same_kind:
            same_kind = [canonicalize(Not(cur))] if not is_role(cur) else [BotRole()]
        new = rng.choice(same_kind)
        st = CertStep(st.objects, new, st.dst, st.rule, st.premises) if kind == "src" else \
            CertStep(st.objects, st.src, new, st.rule, st.premises)
    elif kind == "rule":
        names = [r for r in PRIMITIVE_RULES + MACRO_RULES if r != st.rule]
        st = CertStep(st.objects, st.src, st.dst, rng.choice(names), st.premises)
    elif kind == "premise":
        prem = list(st.premises)
        if prem and (k == 0 or rng.random() < 0.3):
            prem.pop(rng.randrange(len(prem)))
        elif prem:
            j = rng.randrange(len(prem))
            choices = [i for i in range(k) if i != prem[j]]
            if choices:
                prem[j] = rng.choice(choices)
            else:
                prem.pop(j)
        else:
            prem.append(rng.randrange(k) if k else 0)
        st = CertStep(st.objects, st.src, st.dst, st.rule, tuple(prem))
    else:
        raise ValueError(f"unknown mutation {kind!r}")
    steps = list(cert.steps)
    steps[k] = st
    return Certificate(cert.concept, cert.ontology_hash, steps)
