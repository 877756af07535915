"""ALC concepts, ontologies and their concrete prefix syntax.

Concepts are immutable trees.  The text form is fully parenthesized prefix
notation::

    top | bot | NAME | (not C) | (and C D) | (or C D) | (some R C) | (all R C)

Ontology files are line oriented::

    # comment
    concepts: A B C
    roles: R S
    (some R A) => B
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

__all__ = [
    "Top", "Bot", "Name", "Not", "And", "Or", "Exists", "Forall", "Concept",
    "TOP", "BOT", "Signature", "GCI", "Ontology", "ParseError",
    "UndeclaredError", "parse_concept", "print_concept", "parse_ontology",
    "nnf", "canonicalize", "canonical_key", "sub_closure", "size", "names_in",
    "roles_in", "conj", "flatten_and", "is_nnf", "axiom_object",
]

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
KEYWORDS = frozenset({"top", "bot", "not", "and", "or", "some", "all"})


def _cached_hash(self) -> int:
    # concept trees are hashed constantly (labels, memo tables); keep the value
    d = self.__dict__
    h = d.get("_h")
    if h is None:
        h = hash((type(self).__name__, *(d[f] for f in self.__dataclass_fields__)))
        object.__setattr__(self, "_h", h)
    return h


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Name:
    __hash__ = _cached_hash
    id: str

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class Not:
    __hash__ = _cached_hash
    arg: "Concept"

    def __str__(self) -> str:
        return print_concept(self)


@dataclass(frozen=True)
class And:
    __hash__ = _cached_hash
    left: "Concept"
    right: "Concept"

    def __str__(self) -> str:
        return print_concept(self)


@dataclass(frozen=True)
class Or:
    __hash__ = _cached_hash
    left: "Concept"
    right: "Concept"

    def __str__(self) -> str:
        return print_concept(self)


@dataclass(frozen=True)
class Exists:
    __hash__ = _cached_hash
    role: str
    filler: "Concept"

    def __str__(self) -> str:
        return print_concept(self)


@dataclass(frozen=True)
class Forall:
    __hash__ = _cached_hash
    role: str
    filler: "Concept"

    def __str__(self) -> str:
        return print_concept(self)


Concept = Union[Top, Bot, Name, Not, And, Or, Exists, Forall]
TOP = Top()
BOT = Bot()


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UndeclaredError(ValueError):
    def __init__(self, ident: str, kind: str):
        super().__init__(f"undeclared {kind} name {ident!r}")
        self.ident = ident
        self.kind = kind


@dataclass(frozen=True)
class Signature:
    concept_names: tuple[str, ...]
    role_names: tuple[str, ...]

    def __post_init__(self):
        if not self.concept_names or not self.role_names:
            raise ValueError("signature needs at least one concept name and one role name")
        for n in self.concept_names + self.role_names:
            if not IDENT.fullmatch(n) or n in KEYWORDS:
                raise ValueError(f"bad identifier {n!r}")
        if len(set(self.concept_names)) != len(self.concept_names) or len(
            set(self.role_names)
        ) != len(self.role_names):
            raise ValueError("duplicate names in signature")
        if set(self.concept_names) & set(self.role_names):
            raise ValueError("concept and role names must be disjoint")

    @classmethod
    def infer(cls, concepts: Iterable["Concept"], default_role: str = "R") -> "Signature":
        """Smallest signature covering ``concepts`` (padded to be non-empty)."""
        cn: dict[str, None] = {}
        rn: dict[str, None] = {}
        for c in concepts:
            cn.update(dict.fromkeys(names_in(c)))
            rn.update(dict.fromkeys(roles_in(c)))
        if not rn:
            rn[default_role if default_role not in cn else default_role + "_"] = None
        if not cn:
            cn["A" if "A" not in rn else "A_"] = None
        return cls(tuple(cn), tuple(rn))

    def covers(self, c: "Concept") -> bool:
        return set(names_in(c)) <= set(self.concept_names) and set(roles_in(c)) <= set(
            self.role_names
        )


@dataclass(frozen=True)
class GCI:
    lhs: Concept
    rhs: Concept

    def __str__(self) -> str:
        return f"{print_concept(self.lhs)} => {print_concept(self.rhs)}"


@dataclass(frozen=True)
class Ontology:
    signature: Signature
    axioms: tuple[GCI, ...] = field(default=())

    def __post_init__(self):
        # duplicates collapse, first occurrence keeps its position
        object.__setattr__(self, "axioms", tuple(dict.fromkeys(self.axioms)))
        sig = self.signature
        for ax in self.axioms:
            for side in (ax.lhs, ax.rhs):
                for n in names_in(side):
                    if n not in sig.concept_names:
                        raise UndeclaredError(n, "concept")
                for r in roles_in(side):
                    if r not in sig.role_names:
                        raise UndeclaredError(r, "role")

    def to_text(self) -> str:
        lines = [
            "concepts: " + " ".join(self.signature.concept_names),
            "roles: " + " ".join(self.signature.role_names),
        ]
        lines += [str(ax) for ax in self.axioms]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


# -- printing / parsing -------------------------------------------------------

@lru_cache(maxsize=None)
def print_concept(c: Concept) -> str:
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bot):
        return "bot"
    if isinstance(c, Name):
        return c.id
    if isinstance(c, Not):
        return f"(not {print_concept(c.arg)})"
    if isinstance(c, And):
        return f"(and {print_concept(c.left)} {print_concept(c.right)})"
    if isinstance(c, Or):
        return f"(or {print_concept(c.left)} {print_concept(c.right)})"
    if isinstance(c, Exists):
        return f"(some {c.role} {print_concept(c.filler)})"
    if isinstance(c, Forall):
        return f"(all {c.role} {print_concept(c.filler)})"
    raise TypeError(f"not a concept: {c!r}")


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([A-Za-z][A-Za-z0-9_-]*)|(\S))")


def _tokens(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(4):
            raise ParseError(f"unexpected character {m.group(4)!r}", m.start(4))
        start = m.start(m.lastindex)
        out.append((m.group(m.lastindex), start))
        pos = m.end()
    return out


def parse_concept(text: str, sig: Signature | None = None) -> Concept:
    """Parse one concept; with ``sig`` every identifier must be declared."""
    toks = _tokens(text)
    c, i = _parse(toks, 0, sig, len(text))
    if i != len(toks):
        raise ParseError(f"trailing input {toks[i][0]!r}", toks[i][1])
    return c


def _parse(toks, i, sig, end) -> tuple[Concept, int]:
    if i >= len(toks):
        raise ParseError("unexpected end of input", end)
    tok, pos = toks[i]
    if tok == ")":
        raise ParseError("unexpected ')'", pos)
    if tok != "(":
        if tok == "top":
            return TOP, i + 1
        if tok == "bot":
            return BOT, i + 1
        if tok in KEYWORDS:
            raise ParseError(f"keyword {tok!r} outside parentheses", pos)
        if sig is not None and tok not in sig.concept_names:
            raise UndeclaredError(tok, "concept")
        return Name(tok), i + 1
    if i + 1 >= len(toks):
        raise ParseError("unexpected end of input", end)
    op, oppos = toks[i + 1]
    i += 2
    if op == "not":
        a, i = _parse(toks, i, sig, end)
        node: Concept = Not(a)
    elif op in ("and", "or"):
        a, i = _parse(toks, i, sig, end)
        b, i = _parse(toks, i, sig, end)
        node = And(a, b) if op == "and" else Or(a, b)
    elif op in ("some", "all"):
        if i >= len(toks):
            raise ParseError("expected role name", end)
        role, rpos = toks[i]
        if role in "()" or role in KEYWORDS:
            raise ParseError(f"expected role name, got {role!r}", rpos)
        if sig is not None and role not in sig.role_names:
            raise UndeclaredError(role, "role")
        a, i = _parse(toks, i + 1, sig, end)
        node = Exists(role, a) if op == "some" else Forall(role, a)
    else:
        raise ParseError(f"unknown connective {op!r}", oppos)
    if i >= len(toks):
        raise ParseError("expected ')'", end)
    if toks[i][0] != ")":
        raise ParseError(f"expected ')', got {toks[i][0]!r}", toks[i][1])
    return node, i + 1


def parse_ontology(text: str, extra_concepts: Iterable[str] = ()) -> Ontology:
    """Read the line-oriented ontology format.

    Missing ``concepts:``/``roles:`` headers are inferred from the axioms and
    from ``extra_concepts`` (texts that must also be expressible).
    """
    concepts: list[str] | None = None
    roles: list[str] | None = None
    raw_axioms: list[tuple[str, str, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("concepts:"):
            concepts = line[len("concepts:"):].split()
        elif line.startswith("roles:"):
            roles = line[len("roles:"):].split()
        elif "=>" in line:
            lhs, rhs = line.split("=>", 1)
            raw_axioms.append((lhs, rhs, lineno))
        else:
            raise ParseError(f"line {lineno}: expected header or axiom", 0)
    if concepts is None or roles is None:
        seen = [parse_concept(t) for t in extra_concepts]
        for lhs, rhs, _ in raw_axioms:
            seen += [parse_concept(lhs), parse_concept(rhs)]
        inferred = Signature.infer(seen)
        concepts = concepts if concepts is not None else list(inferred.concept_names)
        roles = roles if roles is not None else list(inferred.role_names)
    sig = Signature(tuple(concepts), tuple(roles))
    axioms = tuple(GCI(parse_concept(l, sig), parse_concept(r, sig)) for l, r, _ in raw_axioms)
    return Ontology(sig, axioms)


# -- structure ----------------------------------------------------------------

def _children(c: Concept) -> tuple[Concept, ...]:
    if isinstance(c, Not):
        return (c.arg,)
    if isinstance(c, (And, Or)):
        return (c.left, c.right)
    if isinstance(c, (Exists, Forall)):
        return (c.filler,)
    return ()


def _walk(c: Concept) -> Iterator[Concept]:
    stack = [c]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(_children(x)))


def names_in(c: Concept) -> list[str]:
    return list(dict.fromkeys(x.id for x in _walk(c) if isinstance(x, Name)))


def roles_in(c: Concept) -> list[str]:
    return list(dict.fromkeys(x.role for x in _walk(c) if isinstance(x, (Exists, Forall))))


@lru_cache(maxsize=None)
def size(c: Concept) -> int:
    return 1 + sum(size(x) for x in _children(c))


def is_nnf(c: Concept) -> bool:
    return all(isinstance(x.arg, Name) for x in _walk(c) if isinstance(x, Not))


@lru_cache(maxsize=None)
def nnf(c: Concept) -> Concept:
    if isinstance(c, (Top, Bot, Name)):
        return c
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, Exists):
        return Exists(c.role, nnf(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, nnf(c.filler))
    a = c.arg
    if isinstance(a, Name):
        return c
    if isinstance(a, Top):
        return BOT
    if isinstance(a, Bot):
        return TOP
    if isinstance(a, Not):
        return nnf(a.arg)
    if isinstance(a, And):
        return Or(nnf(Not(a.left)), nnf(Not(a.right)))
    if isinstance(a, Or):
        return And(nnf(Not(a.left)), nnf(Not(a.right)))
    if isinstance(a, Exists):
        return Forall(a.role, nnf(Not(a.filler)))
    return Exists(a.role, nnf(Not(a.filler)))


@lru_cache(maxsize=None)
def canonicalize(c: Concept) -> Concept:
    """Order the operands of every binary connective by printed form."""
    if isinstance(c, (And, Or)):
        l, r = canonicalize(c.left), canonicalize(c.right)
        if print_concept(r) < print_concept(l):
            l, r = r, l
        return type(c)(l, r)
    if isinstance(c, Not):
        return Not(canonicalize(c.arg))
    if isinstance(c, Exists):
        return Exists(c.role, canonicalize(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, canonicalize(c.filler))
    return c


def canonical_key(c: Concept) -> str:
    return print_concept(canonicalize(c))


def conj(parts: Iterable[Concept]) -> Concept:
    """Right-nested conjunction of canonical concepts in key order (deduplicated)."""
    items = sorted({canonicalize(p) for p in parts}, key=print_concept)
    if not items:
        return TOP
    out = items[-1]
    for p in reversed(items[:-1]):
        out = canonicalize(And(p, out))
    return out


def flatten_and(c: Concept) -> list[Concept]:
    if isinstance(c, And):
        return flatten_and(c.left) + flatten_and(c.right)
    return [c]


def axiom_object(ax: GCI) -> Concept:
    """The object ``not E or F`` standing for an axiom, in canonical NNF."""
    return canonicalize(nnf(Or(Not(ax.lhs), ax.rhs)))


def sub_closure(c0: Concept, o: Ontology) -> list[Concept]:
    """NNF subconcepts of ``c0`` and of every axiom, in canonical form.

    Preorder from ``c0`` first, then each axiom object in axiom order.
    """
    seen: dict[Concept, None] = {}

    def visit(c: Concept) -> None:
        stack = [c]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen[x] = None
            stack.extend(reversed(_children(x)))

    visit(canonicalize(nnf(c0)))
    for ax in o.axioms:
        visit(axiom_object(ax))
    return list(seen)
