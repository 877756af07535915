"""Ontology categories: finite object universes closed under the arrow rules.

Reachability is kept as bitset rows (one Python int per object, forward and
reverse), so composition is never materialized as edges.  Every generating
edge carries the name of the rule that introduced it.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .objects import (
    AuxRole, BotRole, Cod, Dom, ExistsRole, NamedRole, TopRole, cod, dom, ref_str,
    ref_to_json,
)
from .semantics import BudgetExceeded
from .syntax import (
    BOT, TOP, And, Concept, Exists, Forall, Not, Ontology, Or,
    axiom_object, canonicalize, flatten_and, nnf, print_concept, roles_in,
    sub_closure, _children,
)

DEFAULT_MAX_OBJECTS = 10_000
_CONCEPT_TYPES = Concept.__args__

# Rules that can be switched off.  Identity, ⊥/⊤ bounds, composition, axiom and
# fixture arrows are structural and always present.
RULES = (
    "disj-in", "disj-univ",
    "conj-out", "conj-univ", "distrib",
    "neg-bot", "neg-top", "neg-max", "neg-min",
    "exists-role", "exists-cod", "exists-dom", "exists-univ",
    "forall-neg", "forall-univ",
    "aux-role", "aux-dom",
    "functor", "bot-role",
)
FULL = frozenset(RULES)
WEAK_CONJUNCTION = FULL - {"distrib"}
WEAK_NEGATION = FULL - {"neg-max", "neg-min"}
MASKS = {
    "full": FULL,
    "weak-conjunction": WEAK_CONJUNCTION,
    "weak-negation": WEAK_NEGATION,
    "weak": WEAK_CONJUNCTION & WEAK_NEGATION,
}


class NotInUniverse(KeyError):
    """A query mentioned an object the universe does not contain."""


@dataclass(frozen=True)
class UniverseConfig:
    extra_objects: tuple = ()
    aux_roles: bool = True
    max_objects: int = DEFAULT_MAX_OBJECTS
    rule_mask: frozenset = FULL
    guided: bool = False
    deadline: Optional[float] = None


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _subterms(c: Concept, out: dict) -> None:
    stack = [c]
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out[x] = None
        stack.extend(_children(x))


class _Rel:
    """A reflexive-transitive relation over object ids, kept closed."""

    def __init__(self):
        self.fwd: list[int] = []
        self.rev: list[int] = []
        self.gen: dict[tuple[int, int], str] = {}

    def add_object(self) -> int:
        i = len(self.fwd)
        self.fwd.append(1 << i)
        self.rev.append(1 << i)
        return i

    def has(self, a: int, b: int) -> bool:
        return bool(self.fwd[a] >> b & 1)

    def add(self, a: int, b: int, tag: str) -> bool:
        if self.fwd[a] >> b & 1:
            return False
        self.gen[(a, b)] = tag
        srcs, tgts = self.rev[a], self.fwd[b]
        fwd, rev = self.fwd, self.rev
        for s in _bits(srcs):
            fwd[s] |= tgts
        for t in _bits(tgts):
            rev[t] |= srcs
        return True

    def copy(self) -> "_Rel":
        r = _Rel()
        r.fwd, r.rev, r.gen = list(self.fwd), list(self.rev), dict(self.gen)
        return r


@dataclass
class OntologyCategory:
    concepts: list = field(default_factory=list)  # Concept | Dom | Cod
    roles: list = field(default_factory=list)
    config: UniverseConfig = field(default_factory=UniverseConfig)
    ontology: Optional[Ontology] = None
    c0: Optional[Concept] = None

    def __post_init__(self):
        self.cidx: dict = {}
        self.ridx: dict = {}
        self.dom_of: list[int] = []
        self.cod_of: list[int] = []
        self.base: list[tuple[int, int, str]] = []
        self.cat = _Rel()
        self.rol = _Rel()
        self.mask = frozenset(self.config.rule_mask)
        self.saturated = False
        for c in list(self.concepts):
            self._concept(c)
        for r in list(self.roles):
            self._role(r)

    # -- construction ----------------------------------------------------------

    def _concept(self, ref) -> int:
        if isinstance(ref, _CONCEPT_TYPES):
            ref = canonicalize(ref)
        i = self.cidx.get(ref)
        if i is not None:
            return i
        if len(self.cidx) + len(self.ridx) >= self.config.max_objects:
            raise BudgetExceeded(f"universe exceeded {self.config.max_objects} objects")
        i = self.cat.add_object()
        self.cidx[ref] = i
        if len(self.concepts) <= i:
            self.concepts.append(ref)
        else:
            self.concepts[i] = ref
        return i

    def _role(self, role) -> int:
        i = self.ridx.get(role)
        if i is not None:
            return i
        if isinstance(role, ExistsRole):
            self._role(NamedRole(role.restriction.role))
            self._concept(role.restriction)
            self._concept(role.restriction.filler)
        elif isinstance(role, AuxRole):
            self._role(ExistsRole(role.restriction))
            self._concept(role.conj)
        if len(self.cidx) + len(self.ridx) >= self.config.max_objects:
            raise BudgetExceeded(f"universe exceeded {self.config.max_objects} objects")
        i = self.rol.add_object()
        self.ridx[role] = i
        if len(self.roles) <= i:
            self.roles.append(role)
        else:
            self.roles[i] = role
        self.dom_of.append(self._concept(dom(role)))
        self.cod_of.append(self._concept(cod(role)))
        return i

    def add_arrow(self, x, y, tag: str = "fixture") -> None:
        """Install a base arrow (kept across :meth:`with_mask`)."""
        a, b = self.index(x), self.index(y)
        self.base.append((a, b, tag))
        self.cat.add(a, b, tag)

    def _finish(self) -> None:
        """Install the always-on arrows and the rule instance tables."""
        top, bot = self._concept(TOP), self._concept(BOT)
        self._top, self._bot = top, bot
        self._rtop, self._rbot = self._role(TopRole()), self._role(BotRole())
        self._reset()
        self._index_rules()

    def _reset(self) -> None:
        self.cat = _Rel()
        self.rol = _Rel()
        for _ in self.concepts:
            self.cat.add_object()
        for _ in self.roles:
            self.rol.add_object()
        n = len(self.concepts)
        # ⊥ and ⊤ are initial and terminal; the rows are set directly
        self.cat.fwd[self._bot] = (1 << n) - 1
        self.cat.rev[self._top] = (1 << n) - 1
        for i in range(n):
            self.cat.fwd[i] |= 1 << self._top
            self.cat.rev[i] |= 1 << self._bot
        m = len(self.roles)
        self.rol.fwd[self._rbot] = (1 << m) - 1
        self.rol.rev[self._rtop] = (1 << m) - 1
        for i in range(m):
            self.rol.fwd[i] |= 1 << self._rtop
            self.rol.rev[i] |= 1 << self._rbot
        for a, b, tag in self.base:
            self.cat.add(a, b, tag)
        self.saturated = False

    def _index_rules(self) -> None:
        cid = self.cidx.get
        self.ands, self.ors, self.exists_roles, self.foralls = [], [], [], []
        self.distribs, self.neg_bots, self.neg_tops, self.forall_negs = [], [], [], []
        self.neg_maxes, self.neg_mins, self.auxes = [], [], []
        for i, c in enumerate(self.concepts):
            if isinstance(c, And):
                l, r = cid(c.left), cid(c.right)
                if l is not None and r is not None:
                    self.ands.append((i, l, r))
                for x, y in ((c.left, c.right), (c.right, c.left)):
                    nx = cid(canonicalize(Not(x)))
                    if nx is not None and cid(y) is not None:
                        self.neg_maxes.append((i, cid(y), nx))
                    if isinstance(x, Not) and canonicalize(x.arg) == canonicalize(y):
                        self.neg_bots.append(i)
                    if isinstance(y, Or):
                        t = canonicalize(Or(And(x, y.left), And(x, y.right)))
                        parts = (And(x, y.left), And(x, y.right), t)
                        if all(cid(canonicalize(p)) is not None for p in parts):
                            self.distribs.append((i, cid(t)))
            elif isinstance(c, Or):
                l, r = cid(c.left), cid(c.right)
                if l is not None and r is not None:
                    self.ors.append((i, l, r))
                for x, y in ((c.left, c.right), (c.right, c.left)):
                    nx = cid(canonicalize(Not(x)))
                    if nx is not None and cid(y) is not None:
                        self.neg_mins.append((i, nx, cid(y)))
                    if isinstance(x, Not) and canonicalize(x.arg) == canonicalize(y):
                        self.neg_tops.append(i)
            elif isinstance(c, Forall):
                f = cid(c.filler)
                rid = self.ridx.get(NamedRole(c.role))
                if f is not None and rid is not None:
                    self.foralls.append((i, rid, f))
                dual = cid(canonicalize(Not(Exists(c.role, Not(c.filler)))))
                if dual is not None:
                    self.forall_negs.append((i, dual))
        for j, r in enumerate(self.roles):
            if isinstance(r, ExistsRole):
                e = r.restriction
                self.exists_roles.append((
                    j, self.ridx[NamedRole(e.role)], cid(e), cid(e.filler),
                    self.dom_of[j], self.cod_of[j]))
            elif isinstance(r, AuxRole):
                self.auxes.append((j, self.ridx[ExistsRole(r.restriction)], self.dom_of[j],
                                   cid(r.conj)))

    # -- queries ----------------------------------------------------------------

    def index(self, ref) -> int:
        key = canonicalize(ref) if isinstance(ref, _CONCEPT_TYPES) else ref
        if key in self.cidx:
            return self.cidx[key]
        raise NotInUniverse(ref_str(key))

    def has(self, x, y) -> bool:
        return self.cat.has(self.index(x), self.index(y))

    def has_role_arrow(self, r, s) -> bool:
        try:
            return self.rol.has(self.ridx[r], self.ridx[s])
        except KeyError as e:
            raise NotInUniverse(ref_str(e.args[0])) from None

    def concept_objects(self) -> list:
        """Objects that are concepts (not fresh dom/cod objects)."""
        return [c for c in self.concepts if not isinstance(c, (Dom, Cod))]

    def arrow_pairs(self, include_fresh: bool = False) -> set:
        """All non-identity arrows of the closure, as id pairs."""
        out = set()
        for a in range(len(self.concepts)):
            if not include_fresh and isinstance(self.concepts[a], (Dom, Cod)):
                continue
            for b in _bits(self.cat.fwd[a]):
                if b == a:
                    continue
                if not include_fresh and isinstance(self.concepts[b], (Dom, Cod)):
                    continue
                out.add((a, b))
        return out

    def role_arrow_pairs(self) -> set:
        return {(a, b) for a in range(len(self.roles)) for b in _bits(self.rol.fwd[a]) if a != b}

    def tag(self, x, y) -> Optional[str]:
        return self.cat.gen.get((self.index(x), self.index(y)))

    def with_mask(self, mask: Iterable[str]) -> "OntologyCategory":
        mask = frozenset(mask)
        unknown = mask - FULL
        if unknown:
            raise ValueError(f"unknown rule name(s): {', '.join(sorted(unknown))}")
        new = object.__new__(OntologyCategory)
        new.__dict__.update(self.__dict__)
        new.concepts, new.roles = list(self.concepts), list(self.roles)
        new.base = list(self.base)
        new.mask = mask
        new._reset()
        return new

    def to_json(self) -> dict:
        return {
            "objects": [{"id": i, "concept": ref_to_json(c)} for i, c in enumerate(self.concepts)],
            "roles": [{"id": i, "role": ref_to_json(r)} for i, r in enumerate(self.roles)],
            "arrows": [{"src": a, "dst": b, "rule": t}
                       for (a, b), t in sorted(self.cat.gen.items())],
            "role_arrows": [{"src": a, "dst": b, "rule": t}
                            for (a, b), t in sorted(self.rol.gen.items())],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def _fixture_category(concepts: Sequence[Concept], roles: Sequence = (),
                      config: UniverseConfig = UniverseConfig()) -> OntologyCategory:
    cat = OntologyCategory([], [], config)
    for c in concepts:
        cat._concept(c)
    for r in roles:
        cat._role(r)
    cat._finish()
    return cat


def category_of(concepts: Iterable, arrows: Iterable = (), roles: Iterable = (),
                mask: Iterable[str] = FULL, close: bool = False,
                aux_roles: bool = True) -> OntologyCategory:
    """A category over hand-picked objects with fixture arrows.

    With ``close`` the object set is closed under subterms and receives the
    restriction and auxiliary roles its concepts call for.
    """
    concepts = [canonicalize(c) for c in concepts]
    for a, b in arrows:
        concepts += [canonicalize(a), canonicalize(b)]
    if close:
        found: dict = {}
        for c in concepts:
            _subterms(c, found)
        concepts = list(found)
    cfg = UniverseConfig(rule_mask=frozenset(mask), aux_roles=aux_roles)
    role_objs = list(roles)
    names = sorted({r for c in concepts for r in roles_in(c)})
    role_objs += [NamedRole(r) for r in names]
    role_objs += _derived_roles(concepts, aux_roles)
    cat = _fixture_category(concepts, role_objs, cfg)
    for a, b in arrows:
        cat.add_arrow(a, b, "fixture")
    return cat


def _derived_roles(concepts, aux_roles: bool) -> list:
    out = []
    for c in concepts:
        if isinstance(c, Exists):
            out.append(ExistsRole(c))
    if aux_roles:
        for c in concepts:
            if isinstance(c, And):
                for e in dict.fromkeys(flatten_and(c)):
                    if isinstance(e, Exists):
                        out.append(AuxRole(c, e))
    return out


# -- universe -------------------------------------------------------------------

def build_universe(c0: Concept, o: Ontology, cfg: UniverseConfig = UniverseConfig()
                   ) -> OntologyCategory:
    """Objects for ``(c0, o)``: closure of the base set under subterms and single
    negation, plus any extra objects, with the roles they require."""
    c = canonicalize(nnf(c0))
    axioms = [axiom_object(ax) for ax in o.axioms]
    base: dict = {}
    for x in [c, TOP, BOT, *axioms, *sub_closure(c0, o)]:
        base[canonicalize(x)] = None
    # single negations, plus the complement pair C ⊓ ¬C, C ⊔ ¬C so that the
    # negation rules have something to fire on
    for x in list(base):
        n = canonicalize(Not(x))
        base[n] = None
        base[canonicalize(And(x, n))] = None
        base[canonicalize(Or(x, n))] = None
    for x in cfg.extra_objects:
        base[canonicalize(x)] = None
    found: dict = {}
    for x in base:
        _subterms(x, found)
        if len(found) > cfg.max_objects:
            raise BudgetExceeded(f"universe exceeded {cfg.max_objects} objects")
    concepts = sorted(found, key=print_concept)
    roles = set(o.signature.role_names)
    for x in concepts:
        roles.update(roles_in(x))
    role_objs = [NamedRole(r) for r in sorted(roles)]
    role_objs += _derived_roles(concepts, cfg.aux_roles)
    cat = _fixture_category(concepts, role_objs, cfg)
    cat.ontology, cat.c0 = o, c
    for ax in axioms:
        cat.add_arrow(TOP, ax, "axiom")
    return cat


# -- saturation -----------------------------------------------------------------

def _apply(cat: OntologyCategory, rule: str) -> bool:
    C, Rl = cat.cat, cat.rol
    fwd, rev = C.fwd, C.rev
    changed = False
    if rule == "disj-in":
        for o, l, r in cat.ors:
            changed |= C.add(l, o, rule)
            changed |= C.add(r, o, rule)
    elif rule == "conj-out":
        for a, l, r in cat.ands:
            changed |= C.add(a, l, rule)
            changed |= C.add(a, r, rule)
    elif rule == "disj-univ":
        for o, l, r in cat.ors:
            for y in _bits(fwd[l] & fwd[r] & ~fwd[o]):
                changed |= C.add(o, y, rule)
    elif rule == "conj-univ":
        for a, l, r in cat.ands:
            for x in _bits(rev[l] & rev[r] & ~rev[a]):
                changed |= C.add(x, a, rule)
    elif rule == "distrib":
        for a, t in cat.distribs:
            changed |= C.add(a, t, rule)
    elif rule == "neg-bot":
        for a in cat.neg_bots:
            changed |= C.add(a, cat._bot, rule)
    elif rule == "neg-top":
        for o in cat.neg_tops:
            changed |= C.add(cat._top, o, rule)
    elif rule == "neg-max":
        # C ⊓ X → ⊥  ⟹  X → ¬C
        for a, x, nc in cat.neg_maxes:
            if fwd[a] >> cat._bot & 1:
                changed |= C.add(x, nc, rule)
    elif rule == "neg-min":
        # ⊤ → C ⊔ X  ⟹  ¬C → X
        for o, nc, x in cat.neg_mins:
            if fwd[cat._top] >> o & 1:
                changed |= C.add(nc, x, rule)
    elif rule == "exists-role":
        for j, named, _e, _f, _d, _c in cat.exists_roles:
            changed |= Rl.add(j, named, rule)
    elif rule == "exists-cod":
        for _j, _n, _e, f, _d, c in cat.exists_roles:
            changed |= C.add(c, f, rule)
    elif rule == "exists-dom":
        for _j, _n, e, _f, d, _c in cat.exists_roles:
            changed |= C.add(d, e, rule)
            changed |= C.add(e, d, rule)
    elif rule == "exists-univ":
        for _j, named, _e, f, d, _c in cat.exists_roles:
            for k in _bits(Rl.rev[named]):
                if fwd[cat.cod_of[k]] >> f & 1:
                    changed |= C.add(cat.dom_of[k], d, rule)
    elif rule == "forall-neg":
        for f, dual in cat.forall_negs:
            changed |= C.add(f, dual, rule)
            changed |= C.add(dual, f, rule)
    elif rule == "forall-univ":
        for f, named, filler in cat.foralls:
            for k in _bits(Rl.rev[named]):
                if fwd[cat.dom_of[k]] >> f & 1:
                    changed |= C.add(cat.cod_of[k], filler, rule)
    elif rule == "aux-role":
        for j, er, _d, _p in cat.auxes:
            changed |= Rl.add(j, er, rule)
    elif rule == "aux-dom":
        for _j, _er, d, p in cat.auxes:
            changed |= C.add(d, p, rule)
            changed |= C.add(p, d, rule)
    elif rule == "functor":
        for a in range(len(cat.roles)):
            for b in _bits(Rl.fwd[a]):
                if b != a:
                    changed |= C.add(cat.dom_of[a], cat.dom_of[b], "functor-dom")
                    changed |= C.add(cat.cod_of[a], cat.cod_of[b], "functor-cod")
    elif rule == "bot-role":
        bot = cat._bot
        for a in range(len(cat.roles)):
            if fwd[cat.dom_of[a]] >> bot & 1 or fwd[cat.cod_of[a]] >> bot & 1:
                changed |= Rl.add(a, cat._rbot, rule)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return changed


def saturate(cat: OntologyCategory, schedule: Optional[Sequence[str]] = None,
             deadline: Optional[float] = None) -> OntologyCategory:
    """Close the arrow relation under the enabled rules (in place)."""
    order = [r for r in (schedule or RULES) if r in cat.mask]
    deadline = deadline if deadline is not None else cat.config.deadline
    changed = True
    while changed:
        changed = False
        for rule in order:
            if _apply(cat, rule):
                changed = True
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded("saturation ran out of time")
    cat.saturated = True
    return cat


def enable_rules(cat: OntologyCategory, rule_mask) -> OntologyCategory:
    """Same objects and base arrows, unsaturated, with only ``rule_mask`` active."""
    if isinstance(rule_mask, str):
        if rule_mask not in MASKS:
            raise ValueError(f"unknown rule mask {rule_mask!r}")
        rule_mask = MASKS[rule_mask]
    return cat.with_mask(rule_mask)


def has_arrow(cat: OntologyCategory, x, y) -> bool:
    return cat.has(x, y)


def decide_cat_unsat(c0: Concept, o: Ontology, cfg: UniverseConfig = UniverseConfig(),
                     certificate=None) -> bool:
    """Whether saturation derives ``c0 → ⊥``.

    In guided mode the objects of a certificate (extracted from a tableau run
    unless one is passed) are added to the universe first.
    """
    if cfg.guided:
        if certificate is None:
            from .certificate import extract_certificate
            from .tableau import decide_sat
            verdict = decide_sat(c0, o, deadline=cfg.deadline)
            if verdict.satisfiable:
                certificate = None
            else:
                certificate = extract_certificate(verdict.meta_tree, c0, o)
        if certificate is not None:
            extra = tuple(cfg.extra_objects) + tuple(certificate.concepts())
            cfg = UniverseConfig(extra, cfg.aux_roles, cfg.max_objects, cfg.rule_mask,
                                 False, cfg.deadline)
    cat = build_universe(c0, o, cfg)
    saturate(cat)
    return cat.has(canonicalize(nnf(c0)), BOT)


# -- export ---------------------------------------------------------------------

def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(cat: OntologyCategory, derived: bool = False, fresh: bool = False) -> str:
    """Graphviz text for the concept side.

    Generating edges are solid and labelled with their rule; with ``derived``
    the remaining closure arrows (except those from ⊥ or into ⊤) are dashed.
    """
    ids = [i for i, c in enumerate(cat.concepts) if fresh or not isinstance(c, (Dom, Cod))]
    ids.sort(key=lambda i: ref_str(cat.concepts[i]))
    name = {i: f"n{k}" for k, i in enumerate(ids)}
    lines = ["digraph category {", "  rankdir=BT;"]
    for i in ids:
        lines.append(f'  {name[i]} [label="{_dot_escape(ref_str(cat.concepts[i]))}"];')
    edges = []
    for (a, b), tag in cat.cat.gen.items():
        if a in name and b in name and a != b:
            edges.append((name[a], name[b], f'label="{_dot_escape(tag)}"'))
    top, bot = cat._top, cat._bot
    if bot in name and top in name and (bot, top) not in cat.cat.gen:
        edges.append((name[bot], name[top], 'label="initial"'))
    if derived:
        gen = set(cat.cat.gen)
        for a in ids:
            if a == bot:
                continue
            for b in _bits(cat.cat.fwd[a]):
                if b != a and b != top and b in name and (a, b) not in gen:
                    edges.append((name[a], name[b], 'style=dashed'))
    order = {n: k for k, n in enumerate(name[i] for i in ids)}
    edges.sort(key=lambda e: (order[e[0]], order[e[1]], e[2]))
    for a, b, attr in edges:
        lines.append(f"  {a} -> {b} [{attr}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
