"""
Shared fixtures and hypothesis strategies.

    structures        small structures over u0..u{n-1} with E (binary) and P (unary)
    labelled_graphs   graphs over v0..v{n-1} with label sets ⊆ 0..max_label
    semigraphs        labelled graphs plus a ∼ relation
    offset_functions  consistent total offsets of a tree, restricted to random nodes
"""
import pytest
from hypothesis import strategies as st

from engine.core.structures import Structure
from engine.eval.semigraphs import LabelledGraph, LabelledSemiGraph
from engine.psp.instances import TreeGroupSpec, generate_instance, shifted
from engine.treecomb.consistency import OffsetFn
from engine.treecomb.trees import BinTree


# =============================================================================
# HYPOTHESIS STRATEGIES
# =============================================================================

@st.composite
def structures(draw, min_size=1, max_size=5):
    n = draw(st.integers(min_value=min_size, max_value=max_size))
    universe = [f"u{i}" for i in range(n)]
    pairs = [(a, b) for a in universe for b in universe]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    marked = draw(st.lists(st.sampled_from(universe), unique=True, max_size=n))
    return Structure.build(universe, {"E": (2, edges), "P": (1, [(e,) for e in marked])})


@st.composite
def structure_pairs(draw, max_size=4):
    """Two structures over one universe and one vocabulary."""
    a = draw(structures(max_size=max_size))
    universe = list(a.universe)
    pairs = [(x, y) for x in universe for y in universe]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    marked = draw(st.lists(st.sampled_from(universe), unique=True, max_size=len(universe)))
    return a, Structure.build(universe, {"E": (2, edges), "P": (1, [(e,) for e in marked])})


@st.composite
def labelled_graphs(draw, max_vertices=6, max_label=6):
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    vertices = tuple(f"v{i}" for i in range(n))
    pairs = [(a, b) for a in vertices for b in vertices]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 15)))
    labels = {v: draw(st.frozensets(st.integers(0, max_label), max_size=3)) for v in vertices}
    return LabelledGraph(vertices, frozenset(edges), labels)


@st.composite
def semigraphs(draw, max_vertices=7, max_label=5):
    g = draw(labelled_graphs(max_vertices=max_vertices, max_label=max_label))
    pairs = [(a, b) for a in g.vertices for b in g.vertices]
    sim = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 6)))
    return LabelledSemiGraph(g.vertices, g.edges, frozenset(sim), g.labels)


@st.composite
def offset_functions(draw, max_height=3, primes=(2, 3, 5)):
    """(tree, ρ) with ρ the restriction of a consistent total function."""
    t = BinTree(draw(st.integers(min_value=1, max_value=max_height)))
    p = draw(st.sampled_from(primes))
    values = {leaf: draw(st.integers(0, p - 1)) for leaf in t.leaves()}
    for v in sorted(t.internal(), reverse=True):
        values[v] = (values[2 * v] + values[2 * v + 1]) % p
    nodes = draw(st.lists(st.sampled_from(list(t.nodes())), unique=True, min_size=1, max_size=5))
    return t, OffsetFn(p, {v: values[v] for v in nodes})


@st.composite
def tree_specs(draw, max_height=3, primes=(2, 3, 5)):
    h = draw(st.integers(min_value=1, max_value=max_height))
    p = draw(st.sampled_from(primes))
    sigma = draw(st.lists(st.integers(0, p - 1), min_size=2 ** h, max_size=2 ** h))
    return TreeGroupSpec(h=h, p=p, sigma=sigma, t=draw(st.integers(0, p - 1)))


# =============================================================================
# FIXTURES
# =============================================================================

@pytest.fixture
def small_graph():
    """u0 -> u1 -> u2 with P = {u0} and constant c = u0."""
    return Structure.build(
        ["u0", "u1", "u2"],
        {"E": (2, [("u0", "u1"), ("u1", "u2")]), "P": (1, [("u0",)])},
        {"c": "u0"},
    )


@pytest.fixture
def small_spec():
    return TreeGroupSpec(h=2, p=3, sigma=[1, 0, 2, 1], t=1)


@pytest.fixture
def psp_pair(small_spec):
    """The positive instance and its shift by one."""
    return generate_instance(small_spec).structure, generate_instance(shifted(small_spec)).structure


@pytest.fixture
def tree3():
    return BinTree(3)
