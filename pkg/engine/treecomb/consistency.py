"""
Consistent Offset Functions
===========================
An offset function maps tree nodes to Z_p. On a closed set it is consistent
when every parent value is the sum of its children's values; on any other
set it is consistent when it extends (uniquely) to a consistent function on
the closure. Equivalently, for every x in the domain and every F inside the
domain that minimally encloses x, ρ(x) is the sum of ρ over F.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from engine.errors import InconsistentOffsetError, TreeError
from engine.treecomb.closures import closure
from engine.treecomb.trees import BinTree


@dataclass(frozen=True)
class OffsetFn:
    p: int
    values: Mapping[int, int] = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        if self.p < 1:
            raise TreeError(f"modulus must be positive, got {self.p}")
        object.__setattr__(self, "values", {v: a % self.p for v, a in sorted(dict(self.values).items())})

    @classmethod
    def zero(cls, p: int, nodes: Iterable[int]) -> "OffsetFn":
        return cls(p, dict.fromkeys(nodes, 0))

    @property
    def domain(self) -> frozenset:
        return frozenset(self.values)

    @property
    def support(self) -> frozenset:
        """Nodes with a non-zero value; the complement of the zero locus in the domain."""
        return frozenset(v for v, a in self.values.items() if a)

    def __getitem__(self, v: int) -> int:
        return self.values[v]

    def __contains__(self, v) -> bool:
        return v in self.values

    def __len__(self) -> int:
        return len(self.values)

    def get(self, v: int, default=None):
        return self.values.get(v, default)

    def items(self):
        return self.values.items()

    def restrict(self, nodes: Iterable[int]) -> "OffsetFn":
        nodes = set(nodes)
        return OffsetFn(self.p, {v: a for v, a in self.values.items() if v in nodes})

    def union(self, other: "OffsetFn") -> "OffsetFn":
        """
        Raises:
            InconsistentOffsetError: on different moduli or a disagreement
        """
        if other.p != self.p:
            raise InconsistentOffsetError(f"moduli differ: {self.p} and {other.p}")
        merged = dict(self.values)
        for v, a in other.values.items():
            if merged.get(v, a) != a:
                raise InconsistentOffsetError(f"offsets disagree at node {v}: {merged[v]} vs {a}")
            merged[v] = a
        return OffsetFn(self.p, merged)

    def minus(self, other: "OffsetFn") -> "OffsetFn":
        """Pointwise difference on the common domain."""
        return OffsetFn(self.p, {v: a - other[v] for v, a in self.values.items() if v in other})

    def to_json(self) -> dict:
        return {"p": self.p, "values": [[v, a] for v, a in self.values.items()]}


def _add_sets(left: frozenset, right: frozenset, p: int) -> frozenset:
    return frozenset((a + b) % p for a in left for b in right)


def enclosing_sum_criterion(t: BinTree, rho: OffsetFn) -> bool:
    """
    For each node v, sums(v) collects Σ ρ(F) over every F ⊆ dom ρ that
    minimally encloses v: either {v} itself or a cut of each child. ρ passes
    when no child-cut sum below a domain node differs from its value.
    """
    dom = t.check(rho.domain)
    if not dom:
        return True
    relevant = set()
    for v in dom:
        relevant.update(t.ancestors(v))

    sums: dict = {}
    for v in sorted(relevant, reverse=True):
        below = frozenset()
        if not t.is_leaf(v):
            left, right = sums.get(2 * v, frozenset()), sums.get(2 * v + 1, frozenset())
            below = _add_sets(left, right, rho.p)
        if v in dom:
            if below - {rho[v]}:
                return False
            sums[v] = below | {rho[v]}
        else:
            sums[v] = below
    return True


def is_consistent(t: BinTree, rho: OffsetFn) -> bool:
    return enclosing_sum_criterion(t, rho)


def _derive(t: BinTree, values: dict, v: int, p: int):
    """Value forced on v by a child-sum or parent-minus-sibling rule, or None."""
    if not t.is_leaf(v):
        left, right = 2 * v, 2 * v + 1
        if left in values and right in values:
            return (values[left] + values[right]) % p
    if v > 1:
        parent, sibling = v // 2, v ^ 1
        if parent in values and sibling in values:
            return (values[parent] - values[sibling]) % p
    return None


def _propagate(t: BinTree, values: dict, region: frozenset, p: int, order: str = "bfs",
               seeds: Iterable[int] | None = None) -> None:
    """Fill every node of region forced by the values already present."""
    pending = deque(sorted(values if seeds is None else seeds))
    pop = pending.popleft if order == "bfs" else pending.pop
    while pending:
        v = pop()
        neighbours = list(t.children(v))
        if v > 1:
            neighbours += [v // 2, v ^ 1]
        for u in neighbours:
            if u in region and u not in values:
                value = _derive(t, values, u, p)
                if value is not None:
                    values[u] = value
                    pending.append(u)


def _check_triples(t: BinTree, values: dict, p: int) -> None:
    for v in sorted(values):
        if t.is_leaf(v):
            continue
        left, right = 2 * v, 2 * v + 1
        if left in values and right in values and values[v] != (values[left] + values[right]) % p:
            raise InconsistentOffsetError(
                f"node {v} has offset {values[v]}, children sum to {(values[left] + values[right]) % p}")


def extend_consistent(t: BinTree, rho: OffsetFn, order: str = "bfs") -> OffsetFn:
    """
    The unique consistent extension of ρ to cl(dom ρ), by eliminating closure
    nodes with the child-sum and parent-minus-sibling rules. `order` picks the
    worklist discipline ("bfs" or "dfs"); the result does not depend on it.

    Raises:
        InconsistentOffsetError: if ρ is not consistent
    """
    region = closure(t, rho.domain)
    values = dict(rho.values)
    _propagate(t, values, region, rho.p, order)
    if set(values) != region:
        raise InconsistentOffsetError("closure nodes left undetermined")
    _check_triples(t, values, rho.p)
    return OffsetFn(rho.p, values)


def zero_completion(t: BinTree, rho: OffsetFn, target: Iterable[int]) -> OffsetFn:
    """
    Consistent extension of ρ onto cl(dom ρ ∪ target). Nodes the closure
    leaves undetermined get 0, smallest heap id first, and the forced values
    are propagated after each choice.

    Raises:
        InconsistentOffsetError: if ρ is not consistent
    """
    region = closure(t, rho.domain | t.check(target))
    values = dict(extend_consistent(t, rho).values)
    for v in sorted(region):
        if v not in values:
            values[v] = 0
            _propagate(t, values, region, rho.p, seeds=[v])
    _check_triples(t, values, rho.p)
    return OffsetFn(rho.p, values)
