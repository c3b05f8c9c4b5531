"""
Closures, closed connected components and enclosing sets.

A set is closed when every related triple (a node with its two children)
that meets it in two nodes lies in it entirely.
"""
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from engine.errors import TreeError
from engine.treecomb.trees import BinTree, min_height


def _triples_of(t: BinTree, v: int) -> list:
    triples = []
    if not t.is_leaf(v):
        triples.append((v, 2 * v, 2 * v + 1))
    if v > 1:
        p = v // 2
        triples.append((p, 2 * p, 2 * p + 1))
    return triples


def closure(t: BinTree, x: Iterable[int]) -> frozenset:
    closed = set(t.check(x))
    queue = deque(sorted(closed))
    while queue:
        v = queue.popleft()
        for triple in _triples_of(t, v):
            missing = [u for u in triple if u not in closed]
            if len(missing) == 1:
                closed.add(missing[0])
                queue.append(missing[0])
    return frozenset(closed)


def is_closed(t: BinTree, x: Iterable[int]) -> bool:
    x = frozenset(x)
    return closure(t, x) == x


@dataclass(frozen=True)
class ClosedComponent:
    nodes: frozenset
    head: int
    frontier: frozenset
    height: int


def components(t: BinTree, x: Iterable[int]) -> list[ClosedComponent]:
    """
    Split a closed set into its maximal closed connected parts, ordered by head.
    height is height(head) - min-h.

    Raises:
        TreeError: if x is not closed
    """
    x = t.check(x)
    if closure(t, x) != x:
        raise TreeError("components needs a closed set")
    seen: set = set()
    result = []
    for start in sorted(x):
        if start in seen:
            continue
        members = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            neighbours = list(t.children(v))
            if v > 1:
                neighbours.append(v // 2)
            for u in neighbours:
                if u in x and u not in members:
                    members.add(u)
                    queue.append(u)
        seen |= members
        head = min(members)
        frontier = frozenset(v for v in members if not any(c in members for c in t.children(v)))
        result.append(ClosedComponent(frozenset(members), head, frontier,
                                      t.height(head) - min_height(t, members)))
    return result


def frontier(t: BinTree, x: Iterable[int]) -> frozenset:
    """Union of the frontiers of the components of a closed set."""
    result: frozenset = frozenset()
    for component in components(t, x):
        result |= component.frontier
    return result


def encloses(t: BinTree, f: Iterable[int], v: int) -> bool:
    """Every path from v down to a leaf meets f."""
    f = frozenset(f)

    def cut(u: int) -> bool:
        if u in f:
            return True
        if t.is_leaf(u):
            return False
        return cut(2 * u) and cut(2 * u + 1)

    return cut(v)


def minimally_encloses(t: BinTree, f: Iterable[int], v: int) -> bool:
    f = t.check(f)
    if not f or not all(t.in_subtree(u, v) for u in f):
        return False

    def used(u: int) -> int | None:
        # number of f-nodes forming an antichain cut below u, None if no cut
        if u in f:
            return 1
        if t.is_leaf(u):
            return None
        left, right = used(2 * u), used(2 * u + 1)
        if left is None or right is None:
            return None
        return left + right

    return used(v) == len(f)
