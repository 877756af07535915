"""Object references shared by the category engine and the certificate format.

Concept-side objects are canonical concepts or the fresh objects ``dom(ρ)`` /
``cod(ρ)`` of a role object ρ.  Role-side objects are named roles, the bounds
``R_top``/``R_bot``, restriction roles ``R_(∃R.C)`` and auxiliary roles ``R_X``
whose domain is identified with a conjunction having an ∃-conjunct.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .syntax import (
    BOT, TOP, Concept, Exists, canonicalize, parse_concept, print_concept,
)


@dataclass(frozen=True)
class NamedRole:
    name: str


@dataclass(frozen=True)
class TopRole:
    pass


@dataclass(frozen=True)
class BotRole:
    pass


@dataclass(frozen=True)
class ExistsRole:
    restriction: Exists


@dataclass(frozen=True)
class AuxRole:
    conj: Concept
    restriction: Exists


Role = Union[NamedRole, TopRole, BotRole, ExistsRole, AuxRole]


@dataclass(frozen=True)
class Dom:
    role: Role


@dataclass(frozen=True)
class Cod:
    role: Role


Ref = Union[Concept, Dom, Cod, Role]
ROLE_TYPES = (NamedRole, TopRole, BotRole, ExistsRole, AuxRole)


def dom(role: Role):
    if isinstance(role, TopRole):
        return TOP
    if isinstance(role, BotRole):
        return BOT
    return Dom(role)


def cod(role: Role):
    if isinstance(role, TopRole):
        return TOP
    if isinstance(role, BotRole):
        return BOT
    return Cod(role)


def is_role(ref) -> bool:
    return isinstance(ref, ROLE_TYPES)


def ref_str(ref) -> str:
    if isinstance(ref, NamedRole):
        return ref.name
    if isinstance(ref, TopRole):
        return "R_top"
    if isinstance(ref, BotRole):
        return "R_bot"
    if isinstance(ref, ExistsRole):
        return f"R_{print_concept(ref.restriction)}"
    if isinstance(ref, AuxRole):
        return f"R_X<{print_concept(ref.conj)} | {print_concept(ref.restriction)}>"
    if isinstance(ref, Dom):
        return f"dom[{ref_str(ref.role)}]"
    if isinstance(ref, Cod):
        return f"cod[{ref_str(ref.role)}]"
    return print_concept(ref)


def ref_to_json(ref):
    if isinstance(ref, NamedRole):
        return {"role": ref.name}
    if isinstance(ref, TopRole):
        return {"role": "top"}
    if isinstance(ref, BotRole):
        return {"role": "bot"}
    if isinstance(ref, ExistsRole):
        return {"exists": print_concept(ref.restriction)}
    if isinstance(ref, AuxRole):
        return {"aux": print_concept(ref.conj), "via": print_concept(ref.restriction)}
    if isinstance(ref, Dom):
        return {"dom": ref_to_json(ref.role)}
    if isinstance(ref, Cod):
        return {"cod": ref_to_json(ref.role)}
    return print_concept(ref)


def ref_from_json(data):
    """Inverse of :func:`ref_to_json`; concepts come back canonicalized."""
    if isinstance(data, str):
        return canonicalize(parse_concept(data))
    if not isinstance(data, dict):
        raise ValueError(f"bad object reference {data!r}")
    if "dom" in data:
        return dom(ref_from_json(data["dom"]))
    if "cod" in data:
        return cod(ref_from_json(data["cod"]))
    if "role" in data:
        name = data["role"]
        if name == "top":
            return TopRole()
        if name == "bot":
            return BotRole()
        return NamedRole(name)
    if "aux" in data:
        via = canonicalize(parse_concept(data["via"]))
        if not isinstance(via, Exists):
            raise ValueError("auxiliary role must point at an existential")
        return AuxRole(canonicalize(parse_concept(data["aux"])), via)
    if "exists" in data:
        e = canonicalize(parse_concept(data["exists"]))
        if not isinstance(e, Exists):
            raise ValueError("restriction role must carry an existential")
        return ExistsRole(e)
    raise ValueError(f"bad object reference {data!r}")
