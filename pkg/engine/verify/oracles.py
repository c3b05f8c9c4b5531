"""
Brute-force references the verify suites compare the engine against. Each
one follows the definition directly and is only meant for tiny inputs.
"""
from functools import lru_cache
from itertools import product

import numpy as np

from engine.eval.semigraphs import LabelledGraph, LabelledSemiGraph
from engine.treecomb.consistency import OffsetFn
from engine.treecomb.trees import BinTree


def naive_chi(g: LabelledGraph, u, level: int) -> bool:
    """(u, ℓ) ∈ χ iff ℓ ≥ 0 and |{v ∈ uE : (v, ⌊(ℓ-1)/|Ev|⌋) ∈ χ}| ∈ C(u)."""
    succ = {v: [b for a, b in g.edges if a == v] for v in g.vertices}
    indeg = {v: sum(1 for _, b in g.edges if b == v) for v in g.vertices}

    @lru_cache(maxsize=None)
    def member(v, ell: int) -> bool:
        if ell < 0:
            return False
        count = sum(1 for w in succ[v] if member(w, (ell - 1) // indeg[w]))
        return count in g.labels.get(v, frozenset())

    return member(u, level)


def union_find_quotient(g: LabelledSemiGraph) -> tuple[set, set, dict]:
    """
    Classes as frozensets of vertices, edges between classes and the merged
    labels, via path-compressing union-find over the ∼ pairs.
    """
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in g.sim:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    members: dict = {}
    for v in g.vertices:
        members.setdefault(find(v), set()).add(v)
    block = {v: frozenset(members[find(v)]) for v in g.vertices}

    edges = {(block[a], block[b]) for a, b in g.edges}
    labels: dict = {}
    for v, values in g.labels.items():
        if values:
            labels[block[v]] = labels.get(block[v], frozenset()) | frozenset(values)
    return set(block.values()), edges, labels


def consistent_table(t: BinTree, p: int) -> np.ndarray:
    """
    Every consistent total offset function of the tree, one row each, with
    column v - 1 holding the value at node v. Rows are indexed by leaf values.
    """
    leaves = list(t.leaves())
    table = np.zeros((p ** len(leaves), t.size), dtype=np.int16)
    for row, values in enumerate(product(range(p), repeat=len(leaves))):
        for leaf, value in zip(leaves, values):
            table[row, leaf - 1] = value
    for v in sorted(t.internal(), reverse=True):
        table[:, v - 1] = (table[:, 2 * v - 1] + table[:, 2 * v]) % p
    return table


def extends_to_total(table: np.ndarray, rho: OffsetFn) -> bool:
    """Some consistent total function agrees with ρ on dom ρ."""
    if not len(rho):
        return True
    columns = [v - 1 for v in sorted(rho.domain)]
    wanted = np.array([rho[v] for v in sorted(rho.domain)], dtype=np.int16)
    return bool(np.any(np.all(table[:, columns] == wanted, axis=1)))
