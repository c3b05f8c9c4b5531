"""
Partial injections between universes and the partial-isomorphism test.
Numbers are never part of an injection: they are mapped to themselves.
"""
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from engine.core.structures import Structure, is_number
from engine.errors import InjectionError, StructureError


@dataclass(frozen=True)
class PartialInjection:
    pairs: Mapping[str, str] = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        pairs = dict(self.pairs)
        if len(set(pairs.values())) != len(pairs):
            seen = {}
            for x, y in sorted(pairs.items()):
                if y in seen:
                    raise InjectionError(f"not injective: {seen[y]} and {x} both map to {y}")
                seen[y] = x
        object.__setattr__(self, "pairs", dict(sorted(pairs.items())))

    @classmethod
    def empty(cls) -> "PartialInjection":
        return cls({})

    @classmethod
    def identity(cls, elements: Iterable[str]) -> "PartialInjection":
        return cls({e: e for e in elements})

    # ==========================================
    # ACCESSORS
    # ==========================================
    @property
    def domain(self) -> frozenset:
        return frozenset(self.pairs)

    @property
    def image(self) -> frozenset:
        return frozenset(self.pairs.values())

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, x) -> bool:
        return x in self.pairs

    def __call__(self, x):
        if is_number(x):
            return x
        try:
            return self.pairs[x]
        except KeyError:
            raise InjectionError(f"{x!r} is not in the domain") from None

    def get(self, x, default=None):
        if is_number(x):
            return x
        return self.pairs.get(x, default)

    def items(self):
        return self.pairs.items()

    def apply(self, values: tuple) -> tuple:
        """Apply to a mixed tuple; numbers are fixed."""
        return tuple(self(v) for v in values)

    def covers(self, values: tuple) -> bool:
        return all(is_number(v) or v in self.pairs for v in values)

    def inverse(self) -> "PartialInjection":
        return PartialInjection({y: x for x, y in self.pairs.items()})

    def restrict(self, keys: Iterable[str]) -> "PartialInjection":
        keys = set(keys)
        return PartialInjection({x: y for x, y in self.pairs.items() if x in keys})

    def is_bijection_on(self, universe: Iterable[str]) -> bool:
        universe = set(universe)
        return self.domain == universe and self.image == universe

    def check_universe(self, universe: Iterable[str]) -> None:
        universe = set(universe)
        outside = sorted((self.domain | self.image) - universe)
        if outside:
            raise InjectionError(f"elements outside the universe: {outside}")

    def to_json(self) -> list:
        return [[x, y] for x, y in self.pairs.items()]

    @classmethod
    def from_json(cls, pairs: list) -> "PartialInjection":
        return cls({x: y for x, y in pairs})


def compose_injection(f: PartialInjection, g: PartialInjection) -> PartialInjection:
    """
    f ∪ g: f on dom(f), g elsewhere on dom(g).

    Raises:
        InjectionError: on disagreement over the overlap or loss of injectivity
    """
    for x in sorted(f.domain & g.domain):
        if f.pairs[x] != g.pairs[x]:
            raise InjectionError(f"disagreement on {x}: {f.pairs[x]} vs {g.pairs[x]}")
    merged = dict(g.pairs)
    merged.update(f.pairs)
    return PartialInjection(merged)


def is_partial_isomorphism(f: PartialInjection, a: Structure, b: Structure) -> bool:
    """
    True iff f preserves every relation in both directions on dom(f) and maps
    pebbled constants of `a` to the matching constants of `b`.

    Constants are checked like unary relations {e}, which keeps the test
    symmetric under swapping (a, b) and inverting f.
    """
    if a.universe != b.universe:
        raise StructureError(["mismatched universes"])
    if set(a.relations) != set(b.relations) or set(a.constants) != set(b.constants):
        raise StructureError(["mismatched vocabularies"])
    f.check_universe(a.universe)

    dom = f.domain
    img = f.image
    inv = f.inverse()

    for name in sorted(a.relations):
        ra = a.relations[name].tuples
        rb = b.relations[name].tuples
        for t in ra:
            if all(e in dom for e in t) and f.apply(t) not in rb:
                return False
        for t in rb:
            if all(e in img for e in t) and inv.apply(t) not in ra:
                return False

    for name in sorted(a.constants):
        ea, eb = a.constants[name], b.constants[name]
        if ea in dom and f.pairs[ea] != eb:
            return False
        if eb in img and inv.pairs[eb] != ea:
            return False
    return True


def extends_partial_isomorphism(f: PartialInjection, x: str, y: str, a: Structure, b: Structure) -> bool:
    """
    Whether f ∪ {x ↦ y} is a partial isomorphism, given that f already is one.

    Only tuples and constants that touch x on the A side or y on the B side
    are checked.
    """
    if x in f:
        return f.pairs[x] == y
    if y in f.image:
        return False
    dom = f.domain | {x}
    img = f.image | {y}
    forward = {**f.pairs, x: y}
    backward = {v: k for k, v in forward.items()}

    for name, t in a.incidence.get(x, ()):
        if all(e in dom for e in t) and tuple(forward[e] for e in t) not in b.relations[name].tuples:
            return False
    for name, t in b.incidence.get(y, ()):
        if all(e in img for e in t) and tuple(backward[e] for e in t) not in a.relations[name].tuples:
            return False
    for name, ea in a.constants.items():
        eb = b.constants[name]
        if (ea == x) != (eb == y):
            return False
    return True
