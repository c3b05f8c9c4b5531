"""Binary-tree closures, consistent offsets, free elements and lift sequences."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engine.errors import InconsistentOffsetError, TreeError
from engine.treecomb import (
    BinTree, OffsetFn, check_lift_conditions, closure, components, encloses, extend_consistent,
    forced_extension, free_elements, frontier, is_closed, is_consistent, lift_sequence, min_height,
    minimally_encloses, zero_completion,
)
from engine.verify.oracles import consistent_table, extends_to_total
from tests.conftest import offset_functions


@st.composite
def node_sets(draw, max_height=4, max_size=6):
    t = BinTree(draw(st.integers(min_value=1, max_value=max_height)))
    nodes = draw(st.lists(st.sampled_from(list(t.nodes())), unique=True, min_size=1, max_size=max_size))
    return t, frozenset(nodes)


@st.composite
def lift_problems(draw):
    t = BinTree(draw(st.integers(min_value=3, max_value=5)))
    p = draw(st.sampled_from([3, 5]))
    values = {leaf: draw(st.integers(0, p - 1)) for leaf in t.leaves()}
    for v in sorted(t.internal(), reverse=True):
        values[v] = (values[2 * v] + values[2 * v + 1]) % p
    nodes = st.sampled_from(list(t.nodes()))
    x = draw(st.lists(nodes, unique=True, min_size=1, max_size=3))
    ys = draw(st.lists(st.lists(nodes, unique=True, min_size=1, max_size=3), min_size=1, max_size=3))
    return t, OffsetFn(p, {v: values[v] for v in x}), [frozenset(y) for y in ys]


# =============================================================================
# TREES
# =============================================================================

def test_tree_navigation(tree3):
    assert tree3.size == 15
    assert list(tree3.leaves()) == list(range(8, 16))
    assert tree3.height(1) == 3 and tree3.height(9) == 0
    assert tree3.children(2) == (4, 5) and tree3.children(9) == ()
    assert list(tree3.ancestors(9)) == [9, 4, 2, 1]
    assert tree3.in_subtree(11, 2) and not tree3.in_subtree(12, 2)
    assert tree3.undirected_path(9, 6) == [9, 4, 2, 1, 3, 6]


def test_nodes_outside_tree_rejected(tree3):
    with pytest.raises(TreeError):
        closure(tree3, [0, 4])
    with pytest.raises(TreeError):
        BinTree(-1)


# =============================================================================
# CLOSURES
# =============================================================================

@pytest.mark.parametrize("nodes,expected", [
    ({2, 4}, {2, 4, 5}),
    ({4, 5}, {2, 4, 5}),
    ({8, 9, 10, 11}, {2, 4, 5, 8, 9, 10, 11}),
    ({1, 8}, {1, 8}),
])
def test_closure(tree3, nodes, expected):
    assert closure(tree3, nodes) == expected
    assert is_closed(tree3, expected)


def test_components(tree3):
    (single,) = components(tree3, {2, 4, 5})
    assert (single.head, single.frontier, single.height) == (2, frozenset({4, 5}), 1)
    heads = [c.head for c in components(tree3, {1, 8})]
    assert heads == [1, 8]
    assert frontier(tree3, {1, 8}) == frozenset({1, 8})
    with pytest.raises(TreeError):
        components(tree3, {2, 4})


def test_enclosing(tree3):
    assert encloses(tree3, {4, 5}, 2)
    assert not encloses(tree3, {4}, 2)
    assert encloses(tree3, {8, 9, 5}, 2)
    assert minimally_encloses(tree3, {4, 5}, 2)
    assert minimally_encloses(tree3, {8, 9, 5}, 2)
    assert not minimally_encloses(tree3, {4, 5, 8}, 2)
    assert not minimally_encloses(tree3, {4, 6}, 2)


@pytest.mark.property_based
@given(node_sets())
@settings(max_examples=300)
def test_closure_keeps_min_height(case):
    t, x = case
    cl = closure(t, x)
    assert x <= cl
    assert closure(t, cl) == cl
    assert min_height(t, cl) == min_height(t, x)


@pytest.mark.property_based
@given(node_sets())
@settings(max_examples=300)
def test_component_frontiers_exceed_height(case):
    t, x = case
    for component in components(t, closure(t, x)):
        assert len(component.frontier) > component.height


# =============================================================================
# OFFSETS
# =============================================================================

def test_offset_values_are_normalised():
    rho = OffsetFn(3, {1: 4, 2: -1, 3: 0})
    assert rho.values == {1: 1, 2: 2, 3: 0}
    assert rho.support == frozenset({1, 2})


def test_offset_union():
    rho = OffsetFn(3, {1: 1})
    assert rho.union(OffsetFn(3, {2: 2})).values == {1: 1, 2: 2}
    with pytest.raises(InconsistentOffsetError):
        rho.union(OffsetFn(3, {1: 2}))
    with pytest.raises(InconsistentOffsetError):
        rho.union(OffsetFn(5, {2: 2}))


@pytest.mark.parametrize("values,expected", [
    ({1: 1, 2: 0, 3: 1}, True),
    ({1: 2, 2: 0, 3: 1}, False),
    ({2: 0, 3: 1}, True),
    ({1: 2}, True),
    ({}, True),
])
def test_consistency_on_small_tree(values, expected):
    assert is_consistent(BinTree(1), OffsetFn(3, values)) is expected


def test_consistency_through_enclosing_cut(tree3):
    # node 2 is enclosed by {8, 9, 5}
    assert is_consistent(tree3, OffsetFn(3, {2: 0, 8: 1, 9: 1, 5: 1}))
    assert not is_consistent(tree3, OffsetFn(3, {2: 0, 8: 1, 9: 1, 5: 2}))


def test_extension_and_zero_completion():
    t = BinTree(1)
    assert extend_consistent(t, OffsetFn(3, {2: 1, 3: 1})).values == {1: 2, 2: 1, 3: 1}
    assert extend_consistent(t, OffsetFn(3, {1: 2, 2: 1})).values == {1: 2, 2: 1, 3: 1}
    with pytest.raises(InconsistentOffsetError):
        extend_consistent(t, OffsetFn(3, {1: 2, 2: 0, 3: 1}))
    completed = zero_completion(t, OffsetFn(3, {1: 2}), {2, 3})
    assert completed.values == {1: 2, 2: 0, 3: 2}


@pytest.mark.property_based
@given(offset_functions())
@settings(max_examples=200)
def test_restricted_total_functions_are_consistent(case):
    t, rho = case
    assert is_consistent(t, rho)
    assert extend_consistent(t, rho, "bfs").values == extend_consistent(t, rho, "dfs").values


@pytest.mark.property_based
@given(node_sets(max_height=3, max_size=5), st.sampled_from([2, 3]), st.data())
@settings(max_examples=300)
def test_consistency_criterion_matches_exhaustive_search(case, p, data):
    t, x = case
    rho = OffsetFn(p, {v: data.draw(st.integers(0, p - 1)) for v in sorted(x)})
    assert is_consistent(t, rho) == extends_to_total(consistent_table(t, p), rho)


# =============================================================================
# FREE ELEMENTS AND LIFTS
# =============================================================================

def test_zero_offsets_leave_everything_free(tree3):
    rho = OffsetFn(3, {4: 0})
    assert free_elements(tree3, {4}, {9}, rho) == closure(tree3, {4, 9})


def test_free_elements_need_consistency():
    with pytest.raises(InconsistentOffsetError):
        free_elements(BinTree(1), {1, 2, 3}, {2}, OffsetFn(3, {1: 2, 2: 0, 3: 1}))


def _cut_sets(t: BinTree, region: frozenset, x: frozenset, u: int) -> list[frozenset]:
    """Every frontier a closed connected set can have below u, u itself included."""
    cuts = [frozenset({u})]
    children = t.children(u)
    if children and all(c in region for c in children) and u not in x:
        cuts += [left | right for left in _cut_sets(t, region, x, children[0])
                 for right in _cut_sets(t, region, x, children[1])]
    return cuts


def _free_by_enumeration(t: BinTree, x: frozenset, y, rho: OffsetFn) -> frozenset:
    region = closure(t, frozenset(y) | x)
    nonzero = {v for v in x if rho.get(v, 0)}
    bound = set()
    for head in region:
        touched = [frozenset({head})]
        children = t.children(head)
        if children and all(c in region for c in children):
            touched += [frozenset({head}) | left | right for left in _cut_sets(t, region, x, children[0])
                        for right in _cut_sets(t, region, x, children[1])]
        for nodes in touched:
            if nodes & nonzero:
                bound |= nodes
    return region - bound


@pytest.mark.property_based
@given(offset_functions(), st.data())
@settings(max_examples=200)
def test_free_elements_match_enumerated_sets(case, data):
    t, rho = case
    y = data.draw(st.lists(st.sampled_from(list(t.nodes())), unique=True, min_size=1, max_size=4))
    assert free_elements(t, rho.domain, y, rho) == _free_by_enumeration(t, rho.domain, y, rho)


@pytest.mark.property_based
@given(offset_functions(), st.data())
@settings(max_examples=200)
def test_forced_extension_stays_consistent(case, data):
    t, rho = case
    y = data.draw(st.lists(st.sampled_from(list(t.nodes())), unique=True, min_size=1, max_size=4))
    extended = forced_extension(t, rho.domain, y, rho)
    assert extended.restrict(rho.domain).values == rho.values
    assert extends_to_total(consistent_table(t, rho.p), extended)


def test_lift_sequence_requires_domain(tree3):
    with pytest.raises(TreeError):
        lift_sequence(tree3, {4}, OffsetFn(3, {5: 1}), [{8}])


def test_lift_conditions_report_length_mismatch(tree3):
    assert check_lift_conditions(tree3, OffsetFn(3), [{8}, {9}], [OffsetFn(3, {8: 0})], 1)


@pytest.mark.property_based
@given(lift_problems())
@settings(max_examples=100, deadline=None)
def test_lift_sequences_satisfy_both_conditions(problem):
    t, rho, ys = problem
    sigmas = lift_sequence(t, rho.domain, rho, ys, 3)
    assert [sigma.domain for sigma in sigmas] == ys
    assert check_lift_conditions(t, rho, ys, sigmas, 3) == []
