"""
Complete binary trees with heap node ids: the root is 1 and the children of
v are 2v and 2v+1. height(v) is the distance to a leaf.
"""
from dataclasses import dataclass
from typing import Iterable, Iterator

from engine.errors import TreeError


@dataclass(frozen=True)
class BinTree:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise TreeError(f"tree height must be non-negative, got {self.n}")

    # ==========================================
    # SHAPE
    # ==========================================
    @property
    def root(self) -> int:
        return 1

    @property
    def size(self) -> int:
        return 2 ** (self.n + 1) - 1

    def nodes(self) -> range:
        return range(1, self.size + 1)

    def leaves(self) -> range:
        return range(2 ** self.n, 2 ** (self.n + 1))

    def internal(self) -> range:
        return range(1, 2 ** self.n)

    def __contains__(self, v) -> bool:
        return isinstance(v, int) and 1 <= v <= self.size

    def check(self, nodes: Iterable[int]) -> frozenset:
        nodes = frozenset(nodes)
        outside = sorted(v for v in nodes if v not in self)
        if outside:
            raise TreeError(f"nodes outside the height-{self.n} tree: {outside}")
        return nodes

    # ==========================================
    # NAVIGATION
    # ==========================================
    @staticmethod
    def depth(v: int) -> int:
        return v.bit_length() - 1

    def height(self, v: int) -> int:
        return self.n - self.depth(v)

    def is_leaf(self, v: int) -> bool:
        return self.depth(v) == self.n

    def children(self, v: int) -> tuple:
        if self.is_leaf(v):
            return ()
        return (2 * v, 2 * v + 1)

    @staticmethod
    def parent(v: int) -> int | None:
        return v // 2 if v > 1 else None

    @staticmethod
    def sibling(v: int) -> int | None:
        return v ^ 1 if v > 1 else None

    @staticmethod
    def grandparent(v: int) -> int | None:
        return v // 4 if v > 3 else None

    def grandchildren(self, v: int) -> tuple:
        if self.height(v) < 2:
            return ()
        return (4 * v, 4 * v + 1, 4 * v + 2, 4 * v + 3)

    def ancestors(self, v: int, inclusive: bool = True) -> Iterator[int]:
        if not inclusive:
            v //= 2
        while v >= 1:
            yield v
            v //= 2

    def in_subtree(self, u: int, v: int) -> bool:
        """u ∈ T(v)."""
        gap = self.depth(u) - self.depth(v)
        return gap >= 0 and (u >> gap) == v

    def subtree(self, v: int) -> Iterator[int]:
        level = [v]
        while level:
            yield from level
            if self.is_leaf(level[0]):
                break
            level = [c for u in level for c in (2 * u, 2 * u + 1)]

    def related_triples(self) -> Iterator[tuple]:
        for v in self.internal():
            yield (v, 2 * v, 2 * v + 1)

    def undirected_path(self, x: int, y: int) -> list:
        up, down = [], []
        while x != y:
            if self.depth(x) >= self.depth(y):
                up.append(x)
                x //= 2
            else:
                down.append(y)
                y //= 2
        return up + [x] + down[::-1]


def min_height(t: BinTree, nodes: Iterable[int]) -> int:
    return min(t.height(v) for v in nodes)


def max_height(t: BinTree, nodes: Iterable[int]) -> int:
    return max(t.height(v) for v in nodes)
