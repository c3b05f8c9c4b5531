"""
Offset functions as bijections of the tree x Z_p universe.

bij(ρ) sends (v, a) to (v, a + ρ(v)) on the nodes of ρ and fixes everything
else, numbers included.
"""
import math
from typing import Iterable

from engine.core.injections import PartialInjection
from engine.errors import InconsistentOffsetError, StructureError, TreeError
from engine.psp.instances import element_id, parse_element
from engine.treecomb.consistency import OffsetFn, extend_consistent, is_consistent
from engine.treecomb.trees import BinTree


def guarantee_size(k: int, q: int) -> int:
    """Tree height and modulus from which the Duplicator strategy is proven to win."""
    return k ** 3 * (3 * q + 1) * (k + 1)


def offset_bijection(rho: OffsetFn, nodes: Iterable[int]) -> PartialInjection:
    """
    bij(ρ) on nodes x Z_p.

    Raises:
        TreeError: if some node has no offset
    """
    pairs = {}
    for v in sorted(set(nodes)):
        if v not in rho:
            raise TreeError(f"no offset for node {v}")
        for a in range(rho.p):
            pairs[element_id(v, a)] = element_id(v, (a + rho[v]) % rho.p)
    return PartialInjection(pairs)


def total_offset_bijection(t: BinTree, rho: OffsetFn) -> PartialInjection:
    """bij(ρ ∪ 0 off dom ρ) on the whole universe."""
    full = OffsetFn(rho.p, {v: rho.get(v, 0) for v in t.nodes()})
    return offset_bijection(full, t.nodes())


def rho_from_injection(f: PartialInjection, p: int) -> OffsetFn | None:
    """
    Offsets read off a position: (v, a) -> (v, b) gives ρ(v) = b - a. None
    when some pebble changes its node, two pebbles on one node disagree, or
    an element is not a tree element.
    """
    values: dict = {}
    for x, y in f.items():
        try:
            (v, a), (w, b) = parse_element(x), parse_element(y)
        except StructureError:
            return None
        if v != w:
            return None
        offset = (b - a) % p
        if values.setdefault(v, offset) != offset:
            return None
    return OffsetFn(p, values)


def null_height(t: BinTree, rho: OffsetFn) -> float:
    """min-h of the non-zero support minus one; math.inf when ρ is zero everywhere."""
    support = rho.support
    if not support:
        return math.inf
    return min(t.height(v) for v in support) - 1


def spike(p: int, nodes: Iterable[int], u: int, value: int = 1) -> OffsetFn:
    """The function on nodes that is zero bar u, with ρ(u) = value."""
    rho = OffsetFn.zero(p, nodes)
    return OffsetFn(p, {**rho.values, u: value})


def spike_closure(t: BinTree, p: int, nodes: Iterable[int], u: int, value: int = 1) -> OffsetFn | None:
    """cl(μ) for the spike at u over nodes, or None when the spike is inconsistent."""
    mu = spike(p, nodes, u, value)
    if not is_consistent(t, mu):
        return None
    try:
        return extend_consistent(t, mu)
    except InconsistentOffsetError:
        return None


def shift_tuple(rho: OffsetFn, values: tuple) -> tuple:
    """Apply bij(ρ) to a mixed tuple; nodes outside dom ρ and numbers stay put."""
    out = []
    for value in values:
        if isinstance(value, str):
            v, a = parse_element(value)
            if v in rho:
                value = element_id(v, (a + rho[v]) % rho.p)
        out.append(value)
    return tuple(out)


def tuple_nodes(values: tuple) -> frozenset:
    """V(ã): the tree nodes of the elements of a tuple."""
    return frozenset(parse_element(v)[0] for v in values if isinstance(v, str))
