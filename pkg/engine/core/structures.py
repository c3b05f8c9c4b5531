"""
Finite Structures
=================
Relational structures over string element ids, with the implicit number
domain {0, ..., |A|}. Elements are `str` and numbers are `int`: the Python
type is the element/number tag, so the two domains never clash.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from engine.errors import NumberDomainError, StructureError

Value = str | int


def is_element(value) -> bool:
    return isinstance(value, str)


def is_number(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def format_value(value: Value) -> str:
    """Element ids print as themselves, numbers as '#<n>'."""
    if is_number(value):
        return f"#{value}"
    return value


def format_tuple(values: tuple) -> str:
    if len(values) == 1:
        return format_value(values[0])
    return "(" + ",".join(format_value(v) for v in values) + ")"


def tuple_elements(values: tuple) -> frozenset:
    """U(v): the element entries of a mixed tuple."""
    return frozenset(v for v in values if is_element(v))


@dataclass(frozen=True)
class Relation:
    arity: int
    tuples: frozenset = frozenset()

    def __contains__(self, item) -> bool:
        return item in self.tuples

    def __len__(self) -> int:
        return len(self.tuples)


@dataclass(frozen=True)
class NumberDomain:
    """{0, ..., max} with max = |universe| of the owning structure."""
    max: int

    def __contains__(self, value) -> bool:
        return is_number(value) and 0 <= value <= self.max

    def __len__(self) -> int:
        return self.max + 1

    def values(self) -> range:
        return range(self.max + 1)


@dataclass(frozen=True, eq=True)
class Structure:
    universe: tuple
    relations: Mapping[str, Relation] = field(default_factory=dict)
    constants: Mapping[str, str] = field(default_factory=dict)

    __hash__ = None

    # ==========================================
    # CONSTRUCTION
    # ==========================================
    @classmethod
    def build(cls, universe: Iterable[str], relations: Mapping | None = None,
              constants: Mapping[str, str] | None = None) -> "Structure":
        """
        Canonical constructor: sorts the universe and validates.

        `relations` maps a name to either a Relation or an (arity, tuples) pair.

        Raises:
            StructureError: listing every violated invariant
        """
        rels = {}
        for name, spec in (relations or {}).items():
            if isinstance(spec, Relation):
                rels[name] = spec
            else:
                arity, tuples = spec
                rels[name] = Relation(int(arity), frozenset(tuple(t) for t in tuples))
        items = list(universe)
        try:
            ordered = tuple(sorted(items))
        except TypeError:
            ordered = tuple(items)
        structure = cls(
            universe=ordered,
            relations=dict(sorted(rels.items())),
            constants=dict(sorted((constants or {}).items())),
        )
        errors = validate_structure(structure)
        if errors:
            raise StructureError(errors)
        return structure

    # ==========================================
    # PROPERTIES
    # ==========================================
    @property
    def size(self) -> int:
        return len(self.universe)

    @property
    def number_domain(self) -> NumberDomain:
        return NumberDomain(len(self.universe))

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.universe)

    @cached_property
    def index(self) -> dict:
        """Position of each element in the canonical order."""
        return {e: i for i, e in enumerate(self.universe)}

    @cached_property
    def incidence(self) -> dict:
        """Element -> the (relation, tuple) pairs it occurs in."""
        found: dict = {e: [] for e in self.universe}
        for name, rel in self.relations.items():
            for t in rel.tuples:
                for e in set(t):
                    found[e].append((name, t))
        return {e: tuple(pairs) for e, pairs in found.items()}

    def relation(self, name: str) -> Relation:
        try:
            return self.relations[name]
        except KeyError:
            raise StructureError([f"unknown relation {name}"]) from None

    def holds(self, name: str, values: tuple) -> bool:
        return tuple(values) in self.relation(name).tuples

    def domain_values(self) -> tuple:
        """A ∪ N(A) in canonical order: elements first, then numbers."""
        return self.universe + tuple(self.number_domain.values())

    def contains_value(self, value) -> bool:
        if is_element(value):
            return value in self.element_set
        return value in self.number_domain

    def rename(self, mapping: Mapping[str, str]) -> "Structure":
        """Image of the structure under an element bijection."""
        return Structure.build(
            [mapping[e] for e in self.universe],
            {name: Relation(rel.arity, frozenset(tuple(mapping[e] for e in t) for t in rel.tuples))
             for name, rel in self.relations.items()},
            {c: mapping[e] for c, e in self.constants.items()},
        )


def validate_structure(s: Structure) -> list[str]:
    """
    Check every Structure invariant.

    Returns:
        Empty list when valid, otherwise one message per violation.
    """
    errors = []
    if not s.universe:
        errors.append("empty universe")
    if len(set(s.universe)) != len(s.universe):
        errors.append("duplicate element ids in universe")
    for e in s.universe:
        if not is_element(e):
            errors.append(f"element id {e!r} is not a string")
    members = set(s.universe)

    for name, rel in sorted(s.relations.items()):
        if rel.arity < 0:
            errors.append(f"negative arity for relation {name}")
        for t in sorted(rel.tuples, key=repr):
            if len(t) != rel.arity:
                errors.append(f"arity mismatch in {name}: {list(t)} has length {len(t)}, expected {rel.arity}")
                continue
            for e in t:
                if e not in members:
                    errors.append(f"unknown element {e!r} in relation {name}")

    for name, e in sorted(s.constants.items()):
        if e not in members:
            errors.append(f"unknown element {e!r} for constant {name}")
    return errors


def encode_number_tuple(r: tuple, n: int) -> int:
    """
    ⟨r⟩ = sum over i of (n+1)^(i-1) * r_i, as an unbounded int.

    Raises:
        NumberDomainError: if a component is not a number in {0..n}
    """
    total = 0
    weight = 1
    for component in r:
        if not is_number(component) or component < 0 or component > n:
            raise NumberDomainError(f"component {component!r} outside number domain 0..{n}")
        total += weight * component
        weight *= n + 1
    return total


def decode_number_tuple(value: int, n: int, length: int) -> tuple:
    """Inverse of encode_number_tuple for tuples of a fixed length."""
    if value < 0 or value >= (n + 1) ** length:
        raise NumberDomainError(f"{value} is not the code of a {length}-tuple over 0..{n}")
    digits = []
    for _ in range(length):
        value, digit = divmod(value, n + 1)
        digits.append(digit)
    return tuple(digits)


def structure_to_json(s: Structure) -> dict:
    """Canonical JSON form: sorted universe, sorted tuples, sorted names."""
    return {
        "universe": list(s.universe),
        "relations": {
            name: {"arity": rel.arity, "tuples": sorted(list(t) for t in rel.tuples)}
            for name, rel in sorted(s.relations.items())
        },
        "constants": dict(sorted(s.constants.items())),
    }


def structure_from_json(data: Mapping) -> Structure:
    """
    Raises:
        StructureError: if the decoded structure is invalid
    """
    try:
        relations = {name: (spec["arity"], spec.get("tuples", []))
                     for name, spec in data.get("relations", {}).items()}
        return Structure.build(data["universe"], relations, data.get("constants", {}))
    except (KeyError, TypeError) as exc:
        raise StructureError([f"malformed structure document: {exc}"]) from exc
