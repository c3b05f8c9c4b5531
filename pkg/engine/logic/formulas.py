"""
Sorted Formula AST
==================
Immutable, hashable nodes for FO / FOC / LFP and the lrec operator.
Every variable carries a sort; number variables print with a '%' prefix.
"""
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Mapping

from engine.core.structures import Structure


class Sort(Enum):
    ELEMENT = auto()
    NUMBER = auto()


# ==========================================
# TERMS
# ==========================================
@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort = Sort.ELEMENT

    def __str__(self) -> str:
        return f"%{self.name}" if self.sort is Sort.NUMBER else self.name


@dataclass(frozen=True)
class Const:
    """A vocabulary constant; always element-sorted."""
    name: str


@dataclass(frozen=True)
class NumLit:
    value: int


Term = Var | Const | NumLit


def term_sort(term: Term) -> Sort:
    match term:
        case Var(sort=sort):
            return sort
        case Const():
            return Sort.ELEMENT
        case NumLit():
            return Sort.NUMBER
    raise TypeError(f"not a term: {term!r}")


def term_vars(terms) -> frozenset:
    return frozenset(t for t in terms if isinstance(t, Var))


# ==========================================
# FORMULAS
# ==========================================
class Formula:
    """Marker base class for formula nodes."""
    __slots__ = ()


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    relation: str
    args: tuple


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Count(Formula):
    """[# var body] = number"""
    var: Var
    body: Formula
    number: Term


@dataclass(frozen=True)
class Lfp(Formula):
    relvar: str
    vars: tuple
    body: Formula
    args: tuple


@dataclass(frozen=True)
class Lrec(Formula):
    """lrec[us; vs; ps](edge; sim; label)(ws; rs)"""
    us: tuple
    vs: tuple
    ps: tuple
    edge: Formula
    sim: Formula
    label: Formula
    ws: tuple
    rs: tuple

    @property
    def c(self) -> int:
        return len(self.us)

    @property
    def d(self) -> int:
        return len(self.ps)

    @property
    def q(self) -> int:
        return len(self.rs)


def conjunction(*parts: Formula) -> Formula:
    result = parts[0]
    for part in parts[1:]:
        result = And(result, part)
    return result


# ==========================================
# VOCABULARY
# ==========================================
@dataclass(frozen=True)
class Vocabulary:
    relations: Mapping[str, int] = field(default_factory=dict)
    constants: frozenset = frozenset()

    __hash__ = None

    @classmethod
    def from_structure(cls, s: Structure) -> "Vocabulary":
        return cls({name: rel.arity for name, rel in s.relations.items()}, frozenset(s.constants))

    def __post_init__(self):
        clash = set(self.relations) & set(self.constants)
        if clash:
            raise ValueError(f"names used for both relations and constants: {sorted(clash)}")
