"""
Labelled Graphs, Semi-Graphs and the χ Recursion
================================================
(u, ℓ) ∈ χ(G, C) iff ℓ ≥ 0 and the number of successors v of u with
(v, ⌊(ℓ-1)/|Ev|⌋) ∈ χ(G, C) lies in C(u).

The quotient of a semi-graph (V, E, ∼) merges ∼-connected vertices,
projects E onto the classes and unions the labels; χ̂ is χ on the quotient.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from engine.core.structures import format_tuple


def _check_vertices(vertices, pairs, what: str) -> None:
    known = set(vertices)
    for a, b in pairs:
        if a not in known or b not in known:
            raise ValueError(f"{what} pair ({a!r}, {b!r}) references an unknown vertex")


@dataclass(frozen=True)
class LabelledGraph:
    vertices: tuple
    edges: frozenset = frozenset()
    labels: Mapping = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        _check_vertices(self.vertices, self.edges, "edge")

    def label(self, v) -> frozenset:
        return self.labels.get(v, frozenset())

    @cached_property
    def position(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def successors(self) -> dict:
        succ = {v: [] for v in self.vertices}
        for a, b in self.edges:
            succ[a].append(b)
        order = self.position
        return {v: tuple(sorted(ws, key=order.__getitem__)) for v, ws in succ.items()}

    @cached_property
    def in_degree(self) -> dict:
        degree = dict.fromkeys(self.vertices, 0)
        for _, b in self.edges:
            degree[b] += 1
        return degree


@dataclass(frozen=True)
class LabelledSemiGraph:
    vertices: tuple
    edges: frozenset = frozenset()
    sim: frozenset = frozenset()
    labels: Mapping = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        _check_vertices(self.vertices, self.edges, "edge")
        _check_vertices(self.vertices, self.sim, "sim")

    def label(self, v) -> frozenset:
        return self.labels.get(v, frozenset())


class ChiEvaluator:
    """
    Memoized χ membership for one labelled graph. The recursion runs on an
    explicit stack; counters can reach n^q, far beyond Python's recursion limit.
    """

    def __init__(self, graph: LabelledGraph):
        self.graph = graph
        self.memo: dict = {}

    def holds(self, u, level: int) -> bool:
        if level < 0:
            return False
        key = (u, level)
        if key in self.memo:
            return self.memo[key]

        succ = self.graph.successors
        indeg = self.graph.in_degree
        stack = [key]
        while stack:
            v, current = stack[-1]
            if (v, current) in self.memo:
                stack.pop()
                continue
            pending = []
            count = 0
            for w in succ[v]:
                child_level = (current - 1) // indeg[w]
                if child_level < 0:
                    continue
                child = (w, child_level)
                if child in self.memo:
                    count += self.memo[child]
                else:
                    pending.append(child)
            if pending:
                stack.extend(pending)
                continue
            self.memo[(v, current)] = count in self.graph.label(v)
            stack.pop()
        return self.memo[key]


def chi(g: LabelledGraph, u, level: int) -> bool:
    if u not in g.position:
        raise ValueError(f"unknown vertex {u!r}")
    return ChiEvaluator(g).holds(u, level)


@dataclass(frozen=True)
class QuotientGraph:
    """Classes are numbered in order of their first member in the vertex order."""
    classes: tuple
    class_of: Mapping
    edges: frozenset
    labels: Mapping

    __hash__ = None

    @cached_property
    def graph(self) -> LabelledGraph:
        return LabelledGraph(tuple(range(len(self.classes))), self.edges, self.labels)

    @cached_property
    def chi(self) -> ChiEvaluator:
        return ChiEvaluator(self.graph)

    @cached_property
    def representatives(self) -> tuple:
        return tuple(members[0] for members in self.classes)

    def holds(self, vertex, level: int) -> bool:
        return self.chi.holds(self.class_of[vertex], level)

    def successors(self, class_id: int) -> tuple:
        return self.graph.successors[class_id]

    def in_degree(self, class_id: int) -> int:
        return self.graph.in_degree[class_id]

    def same_class(self, a, b) -> bool:
        return self.class_of[a] == self.class_of[b]


def quotient(g: LabelledSemiGraph) -> QuotientGraph:
    """
    Classes are the weakly connected components of the ∼ graph, found with
    scipy's csgraph; [E] and Ĉ are projected onto them.
    """
    n = len(g.vertices)
    if n == 0:
        return QuotientGraph((), {}, frozenset(), {})
    index = {v: i for i, v in enumerate(g.vertices)}
    rows = [index[a] for a, _ in g.sim]
    cols = [index[b] for _, b in g.sim]
    matrix = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, component = connected_components(matrix, directed=True, connection="weak")

    renumber: dict = {}
    members: list[list] = []
    class_of = {}
    for i, v in enumerate(g.vertices):
        label = int(component[i])
        if label not in renumber:
            renumber[label] = len(members)
            members.append([])
        members[renumber[label]].append(v)
        class_of[v] = renumber[label]

    edges = frozenset((class_of[a], class_of[b]) for a, b in g.edges)
    labels = {}
    for v, values in g.labels.items():
        if values:
            cid = class_of[v]
            labels[cid] = labels.get(cid, frozenset()) | frozenset(values)
    return QuotientGraph(tuple(tuple(m) for m in members), class_of, edges, labels)


def chi_hat(g: LabelledSemiGraph, u, level: int) -> bool:
    """χ̂(G, C) = χ([G], Ĉ) at the class of u."""
    q = quotient(g)
    if u not in q.class_of:
        raise ValueError(f"unknown vertex {u!r}")
    return q.holds(u, level)


# ============================================================
# JSON form: relations E, SIM and the label relation C
# ============================================================

def semigraph_to_json(g: LabelledSemiGraph) -> dict:
    name = {v: (v if isinstance(v, str) else format_tuple(v)) for v in g.vertices}
    return {
        "universe": [name[v] for v in g.vertices],
        "relations": {
            "E": {"arity": 2, "tuples": sorted([name[a], name[b]] for a, b in g.edges)},
            "SIM": {"arity": 2, "tuples": sorted([name[a], name[b]] for a, b in g.sim)},
            "C": {"arity": 2, "tuples": sorted([name[v], int(x)] for v, xs in g.labels.items() for x in xs)},
        },
        "constants": {},
    }


def semigraph_from_json(data: dict) -> LabelledSemiGraph:
    relations = data.get("relations", {})
    vertices = tuple(data["universe"])

    def pairs(key):
        return frozenset(tuple(t) for t in relations.get(key, {}).get("tuples", []))

    labels: dict = {}
    for v, x in relations.get("C", {}).get("tuples", []):
        labels.setdefault(v, set()).add(int(x))
    return LabelledSemiGraph(vertices, pairs("E"), pairs("SIM"),
                             {v: frozenset(xs) for v, xs in labels.items()})
