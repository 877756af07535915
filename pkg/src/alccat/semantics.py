"""Finite interpretations, concept evaluation and bounded model search."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Mapping

from .syntax import (
    And, Bot, Concept, Exists, Name, Not, Ontology, Or, Top,
    axiom_object, names_in, nnf, roles_in,
)

DEFAULT_MODEL_CAP = 2 ** 24


class BudgetExceeded(RuntimeError):
    """A configured search/resource budget ran out."""


@dataclass(frozen=True)
class Interpretation:
    domain_size: int
    concept_ext: Mapping[str, frozenset] = field(default_factory=dict)
    role_ext: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if self.domain_size < 1:
            raise ValueError("domain must be non-empty")
        n = self.domain_size
        for name, ext in self.concept_ext.items():
            if any(not 0 <= x < n for x in ext):
                raise ValueError(f"extension of {name} leaves the domain")
        for name, ext in self.role_ext.items():
            if any(not (0 <= x < n and 0 <= y < n) for x, y in ext):
                raise ValueError(f"extension of {name} leaves the domain")

    @property
    def domain(self) -> frozenset:
        return frozenset(range(self.domain_size))

    def to_json(self) -> dict:
        return {
            "domain_size": self.domain_size,
            "concepts": {k: sorted(v) for k, v in self.concept_ext.items()},
            "roles": {k: sorted([list(p) for p in v]) for k, v in self.role_ext.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Interpretation":
        return cls(
            data["domain_size"],
            {k: frozenset(v) for k, v in data.get("concepts", {}).items()},
            {k: frozenset(tuple(p) for p in v) for k, v in data.get("roles", {}).items()},
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def eval_concept(c: Concept, i: Interpretation) -> frozenset:
    """Extension of ``c`` in ``i``; names absent from ``i`` are errors."""
    n = i.domain_size
    full = (1 << n) - 1
    succ: dict[str, list[int]] = {}
    for r, pairs in i.role_ext.items():
        rows = [0] * n
        for x, y in pairs:
            rows[x] |= 1 << y
        succ[r] = rows

    def ev(c: Concept) -> int:
        if isinstance(c, Top):
            return full
        if isinstance(c, Bot):
            return 0
        if isinstance(c, Name):
            if c.id not in i.concept_ext:
                raise KeyError(f"unknown concept name {c.id!r}")
            m = 0
            for x in i.concept_ext[c.id]:
                m |= 1 << x
            return m
        if isinstance(c, Not):
            return full & ~ev(c.arg)
        if isinstance(c, And):
            return ev(c.left) & ev(c.right)
        if isinstance(c, Or):
            return ev(c.left) | ev(c.right)
        if c.role not in succ:
            raise KeyError(f"unknown role name {c.role!r}")
        rows = succ[c.role]
        inner = ev(c.filler)
        out = 0
        for x in range(n):
            if isinstance(c, Exists):
                hit = rows[x] & inner
            else:
                hit = not (rows[x] & ~inner)
            if hit:
                out |= 1 << x
        return out

    m = ev(c)
    return frozenset(x for x in range(n) if m >> x & 1)


def satisfies(o: Ontology, i: Interpretation) -> bool:
    return all(eval_concept(ax.lhs, i) <= eval_concept(ax.rhs, i) for ax in o.axioms)


def is_model_witness(c: Concept, o: Ontology, i: Interpretation) -> bool:
    return satisfies(o, i) and bool(eval_concept(c, i))


# -- bounded model search -------------------------------------------------------
#
# Candidate interpretations of one size are ordered lexicographically on the bit
# vector (concept names in signature order, element by element; then roles in
# signature order, pairs row-major), 0 before 1.  A depth-first search assigning
# bits in that order with 0 tried first meets models in exactly that order, so
# partial assignments can be pruned with Kleene three-valued evaluation without
# changing which model is found first.

class _Partial:
    __slots__ = ("n", "full", "clo", "chi", "rlo", "rhi")

    def __init__(self, n, concepts, roles):
        self.n = n
        self.full = (1 << n) - 1
        self.clo = {a: 0 for a in concepts}
        self.chi = {a: self.full for a in concepts}
        self.rlo = {r: [0] * n for r in roles}
        self.rhi = {r: [self.full] * n for r in roles}

    def ev(self, c: Concept) -> tuple[int, int]:
        if isinstance(c, Top):
            return self.full, self.full
        if isinstance(c, Bot):
            return 0, 0
        if isinstance(c, Name):
            return self.clo[c.id], self.chi[c.id]
        if isinstance(c, Not):
            lo, hi = self.ev(c.arg)
            return self.full & ~hi, self.full & ~lo
        if isinstance(c, And):
            a, b = self.ev(c.left), self.ev(c.right)
            return a[0] & b[0], a[1] & b[1]
        if isinstance(c, Or):
            a, b = self.ev(c.left), self.ev(c.right)
            return a[0] | b[0], a[1] | b[1]
        flo, fhi = self.ev(c.filler)
        rlo, rhi = self.rlo[c.role], self.rhi[c.role]
        lo = hi = 0
        for x in range(self.n):
            if isinstance(c, Exists):
                if rlo[x] & flo:
                    lo |= 1 << x
                if rhi[x] & fhi:
                    hi |= 1 << x
            else:
                if not rhi[x] & ~flo:
                    lo |= 1 << x
                if not rlo[x] & ~fhi:
                    hi |= 1 << x
        return lo & self.full, hi & self.full


def find_model(
    c: Concept,
    o: Ontology,
    max_size: int,
    cap: int = DEFAULT_MODEL_CAP,
    deadline: float | None = None,
) -> Interpretation | None:
    """First model of ``o`` with non-empty ``c``, by size then bit order.

    ``None`` means no model up to ``max_size`` exists, which is not a proof of
    unsatisfiability.  Raises :class:`BudgetExceeded` once more than ``cap``
    search nodes were visited or ``deadline`` (a ``time.monotonic`` value) passed.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    sig = o.signature
    target = nnf(c)
    constraints = [nnf(axiom_object(ax)) for ax in o.axioms]
    used_c = set(names_in(target))
    used_r = set(roles_in(target))
    for k in constraints:
        used_c.update(names_in(k))
        used_r.update(roles_in(k))
    concepts = [a for a in sig.concept_names if a in used_c] + sorted(
        used_c - set(sig.concept_names))
    roles = [r for r in sig.role_names if r in used_r] + sorted(used_r - set(sig.role_names))
    visited = 0
    for n in range(1, max_size + 1):
        st = _Partial(n, concepts, roles)
        # (kind, name, x, y) in lexicographic bit order
        bits = [("c", a, x, None) for a in concepts for x in range(n)]
        bits += [("r", r, x, y) for r in roles for x in range(n) for y in range(n)]

        def feasible() -> bool:
            if not st.ev(target)[1]:
                return False
            for k in constraints:
                if st.ev(k)[1] != st.full:
                    return False
            return True

        def assign(b, val):
            kind, name, x, y = b
            if kind == "c":
                if val:
                    st.clo[name] |= 1 << x
                else:
                    st.chi[name] &= ~(1 << x)
            else:
                if val:
                    st.rlo[name][x] |= 1 << y
                else:
                    st.rhi[name][x] &= ~(1 << y)

        def unassign(b, val):
            kind, name, x, y = b
            if kind == "c":
                if val:
                    st.clo[name] &= ~(1 << x)
                else:
                    st.chi[name] |= 1 << x
            else:
                if val:
                    st.rlo[name][x] &= ~(1 << y)
                else:
                    st.rhi[name][x] |= 1 << y

        def search(k: int) -> bool:
            nonlocal visited
            visited += 1
            if visited > cap:
                raise BudgetExceeded(f"model search visited more than {cap} candidates")
            if deadline is not None and visited % 256 == 0 and time.monotonic() > deadline:
                raise BudgetExceeded("model search ran out of time")
            if not feasible():
                return False
            if k == len(bits):
                return True
            for val in (0, 1):
                assign(bits[k], val)
                if search(k + 1):
                    return True
                unassign(bits[k], val)
            return False

        if search(0):
            cext = {a: frozenset(x for x in range(n) if st.clo.get(a, 0) >> x & 1)
                    for a in sig.concept_names}
            rext = {r: frozenset((x, y) for x in range(n) for y in range(n)
                                 if r in st.rlo and st.rlo[r][x] >> y & 1)
                    for r in sig.role_names}
            return Interpretation(n, cext, rext)
    return None


def enumerate_interpretations(concepts, roles, n):
    """Every interpretation of size ``n`` over the given names (tests only)."""
    nc, nr = len(concepts), len(roles)
    total = nc * n + nr * n * n
    for v in range(1 << total):
        cext, pos = {}, 0
        for a in concepts:
            cext[a] = frozenset(x for x in range(n) if v >> (pos + x) & 1)
            pos += n
        rext = {}
        for r in roles:
            rext[r] = frozenset(
                (x, y) for x in range(n) for y in range(n) if v >> (pos + x * n + y) & 1)
            pos += n * n
        yield Interpretation(n, cext, rext)
