"""Structures, number tuple codes and partial injections."""
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engine.core.injections import (
    PartialInjection, compose_injection, extends_partial_isomorphism, is_partial_isomorphism,
)
from engine.core.structures import (
    Structure, decode_number_tuple, encode_number_tuple, format_tuple, structure_from_json, structure_to_json,
    tuple_elements, validate_structure,
)
from engine.errors import InjectionError, NumberDomainError, StructureError
from tests.conftest import structure_pairs, structures


# =============================================================================
# STRUCTURES
# =============================================================================

def test_build_sorts_universe_and_names():
    s = Structure.build(["b", "a"], {"Q": (1, [("b",)]), "E": (2, [])}, {"c": "a"})
    assert s.universe == ("a", "b")
    assert list(s.relations) == ["E", "Q"]
    assert s.size == 2
    assert s.number_domain.max == 2


def test_build_reports_every_violation():
    with pytest.raises(StructureError) as exc:
        Structure.build(["a"], {"E": (2, [("a", "z"), ("a",)])}, {"c": "y"})
    violations = exc.value.violations
    assert any("unknown element 'z'" in v for v in violations)
    assert any("arity mismatch" in v for v in violations)
    assert any("constant c" in v for v in violations)


def test_empty_universe_rejected():
    with pytest.raises(StructureError):
        Structure.build([], {})


def test_numbers_and_elements_are_disjoint(small_graph):
    assert small_graph.contains_value("u0")
    assert small_graph.contains_value(3)
    assert not small_graph.contains_value(4)
    assert small_graph.domain_values() == ("u0", "u1", "u2", 0, 1, 2, 3)


def test_tuple_helpers():
    assert tuple_elements(("u0", 2, "u1")) == frozenset({"u0", "u1"})
    assert format_tuple(("u0", 2)) == "(u0,#2)"
    assert format_tuple((3,)) == "#3"


@given(structures())
@settings(max_examples=50)
def test_json_form_rebuilds_structure(s):
    assert structure_from_json(structure_to_json(s)) == s
    assert validate_structure(s) == []


def test_rename_is_an_isomorphism(small_graph):
    mapping = {"u0": "w2", "u1": "w0", "u2": "w1"}
    renamed = small_graph.rename(mapping)
    assert renamed.holds("E", ("w2", "w0"))
    assert renamed.constants == {"c": "w2"}


# =============================================================================
# NUMBER TUPLES
# =============================================================================

@pytest.mark.parametrize("n,length", [(1, 1), (2, 2), (3, 3), (4, 2)])
def test_number_tuple_codes_are_a_bijection(n, length):
    codes = [encode_number_tuple(r, n) for r in product(range(n + 1), repeat=length)]
    assert sorted(codes) == list(range((n + 1) ** length))
    for code in codes:
        assert encode_number_tuple(decode_number_tuple(code, n, length), n) == code


def test_number_tuple_code_weights_first_component_lowest():
    assert encode_number_tuple((1, 0), 2) == 1
    assert encode_number_tuple((0, 1), 2) == 3


def test_number_tuple_rejects_components_outside_domain():
    with pytest.raises(NumberDomainError):
        encode_number_tuple((3,), 2)
    with pytest.raises(NumberDomainError):
        encode_number_tuple(("u0",), 2)
    with pytest.raises(NumberDomainError):
        decode_number_tuple(9, 2, 2)


# =============================================================================
# PARTIAL INJECTIONS
# =============================================================================

def test_injection_rejects_collisions():
    with pytest.raises(InjectionError):
        PartialInjection({"a": "x", "b": "x"})


def test_numbers_are_fixed():
    f = PartialInjection({"a": "b"})
    assert f.apply(("a", 3)) == ("b", 3)
    assert f.covers((2, "a"))
    assert not f.covers(("b",))


def test_compose_keeps_left_values_and_rejects_disagreement():
    f = PartialInjection({"a": "b"})
    assert compose_injection(f, PartialInjection({"c": "c"})).pairs == {"a": "b", "c": "c"}
    with pytest.raises(InjectionError):
        compose_injection(f, PartialInjection({"a": "c"}))
    with pytest.raises(InjectionError):
        compose_injection(f, PartialInjection({"c": "b"}))


def test_partial_iso_checks_constants(small_graph):
    other = Structure.build(small_graph.universe, small_graph.relations, {"c": "u1"})
    assert not is_partial_isomorphism(PartialInjection({"u0": "u0"}), small_graph, other)
    assert is_partial_isomorphism(PartialInjection({"u2": "u2"}), small_graph, other)


def test_partial_iso_on_edges(small_graph):
    assert is_partial_isomorphism(PartialInjection.identity(small_graph.universe), small_graph, small_graph)
    assert not is_partial_isomorphism(PartialInjection({"u0": "u1", "u1": "u2"}), small_graph, small_graph)


@pytest.mark.property_based
@given(structure_pairs(), st.data())
@settings(max_examples=100)
def test_partial_iso_symmetric_under_inverse(pair, data):
    a, b = pair
    universe = list(a.universe)
    domain = data.draw(st.lists(st.sampled_from(universe), unique=True, max_size=len(universe)))
    image = data.draw(st.permutations(universe))[:len(domain)]
    f = PartialInjection(dict(zip(domain, image)))
    assert is_partial_isomorphism(f, a, b) == is_partial_isomorphism(f.inverse(), b, a)


@pytest.mark.property_based
@given(structures(), st.data())
@settings(max_examples=50)
def test_restrictions_of_partial_isos_stay_partial_isos(s, data):
    image = data.draw(st.permutations(list(s.universe)))
    f = PartialInjection(dict(zip(s.universe, image)))
    if is_partial_isomorphism(f, s, s):
        keys = data.draw(st.lists(st.sampled_from(list(s.universe)), unique=True))
        assert is_partial_isomorphism(f.restrict(keys), s, s)


@pytest.mark.property_based
@given(structure_pairs(), st.data())
@settings(max_examples=100)
def test_one_pair_extension_agrees_with_the_full_check(pair, data):
    a, b = pair
    order = data.draw(st.permutations(list(a.universe)))
    image = data.draw(st.permutations(list(a.universe)))
    f = PartialInjection.empty()
    for x, y in zip(order, image):
        grown = compose_injection(f, PartialInjection({x: y}))
        assert extends_partial_isomorphism(f, x, y, a, b) == is_partial_isomorphism(grown, a, b)
        if not is_partial_isomorphism(grown, a, b):
            break
        f = grown


def test_one_pair_extension_checks_constants_and_clashes(small_graph):
    other = Structure.build(small_graph.universe, small_graph.relations, {"c": "u1"})
    empty = PartialInjection.empty()
    assert not extends_partial_isomorphism(empty, "u0", "u0", small_graph, other)
    assert extends_partial_isomorphism(empty, "u0", "u1", small_graph, other) == \
        is_partial_isomorphism(PartialInjection({"u0": "u1"}), small_graph, other)
    f = PartialInjection({"u2": "u2"})
    assert not extends_partial_isomorphism(f, "u1", "u2", small_graph, small_graph)
    assert extends_partial_isomorphism(f, "u2", "u2", small_graph, small_graph)
    assert not extends_partial_isomorphism(f, "u2", "u1", small_graph, small_graph)


def test_incidence_lists_each_tuple_once_per_element():
    s = Structure.build(["a", "b"], {"E": (2, [("a", "a"), ("a", "b")]), "P": (1, [("b",)])})
    assert sorted(s.incidence["a"]) == [("E", ("a", "a")), ("E", ("a", "b"))]
    assert sorted(s.incidence["b"]) == [("E", ("a", "b")), ("P", ("b",))]
