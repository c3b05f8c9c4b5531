"""Evaluation of FO / FOC / LFP / lrec, the χ recursion, quotients and interpretations."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engine.errors import BudgetExceededError, InterpretationError, SortError, UnboundVariableError
from engine.eval import (
    Budget, Interpretation, LabelledGraph, LabelledSemiGraph, SemiGraphInterpretation, apply_interpretation,
    chi, chi_hat, eval_formula, eval_lrec, quotient,
)
from engine.logic.formulas import Sort, Var, Vocabulary
from engine.logic.parser import parse_formula
from engine.verify.oracles import naive_chi, union_find_quotient
from tests.conftest import labelled_graphs, semigraphs

X, Y = Var("x"), Var("y")


def holds(s, text, env=None, budget=None):
    return eval_formula(parse_formula(text, Vocabulary.from_structure(s)), s, env, budget)


# =============================================================================
# FO / FOC / LFP
# =============================================================================

@pytest.mark.parametrize("text,expected", [
    ("exists x. E(c, x)", True),
    ("exists x. E(x, c)", False),
    ("forall x. P(x)", False),
    ("forall x. P(x) | exists y. E(y, x)", True),
    ("count{x : exists y. E(x, y)} = 2", True),
    ("count{x : exists y. E(x, y)} = 1", False),
    ("exists %n. count{x : P(x)} = %n & %n = 1", True),
    ("count{x : P(x) & !P(x)} = 0", True),
])
def test_first_order_and_counting(small_graph, text, expected):
    assert holds(small_graph, text) is expected


def test_free_variables_need_bindings_of_the_right_sort(small_graph):
    with pytest.raises(UnboundVariableError):
        holds(small_graph, "P(x)")
    with pytest.raises(SortError):
        holds(small_graph, "P(x)", {X: 2})
    with pytest.raises(SortError):
        holds(small_graph, "exists x. %n = 1", {Var("n", Sort.NUMBER): 9})
    assert holds(small_graph, "P(x)", {X: "u0"})


@pytest.mark.parametrize("target,expected", [("u0", False), ("u1", True), ("u2", True)])
def test_lfp_strict_reachability(small_graph, target, expected):
    text = f"lfp[X, u](E(c, u) | exists v. X(v) & E(v, u))({target})"
    assert holds(small_graph, text) is expected


def test_lfp_backwards_reachability(small_graph):
    text = "lfp[X, u](u = c | exists v. X(v) & E(u, v))(y)"
    assert holds(small_graph, text, {Y: "u0"})
    assert not holds(small_graph, text, {Y: "u2"})


def test_lfp_respects_pair_budget(small_graph):
    text = "lfp[X, u](u = c | exists v. X(v) & E(v, u))(c)"
    with pytest.raises(BudgetExceededError):
        holds(small_graph, text, budget=Budget(max_pairs=2))


# =============================================================================
# LREC
# =============================================================================

# On the path u0 -> u1 -> u2 with label {0} everywhere, u2 holds at every
# level, u1 only at level 0 and u0 at the even levels up to 2.
@pytest.mark.parametrize("counter,expected", [(0, True), (1, False), (2, True)])
def test_lrec_on_a_path(small_graph, counter, expected):
    assert holds(small_graph, f"lrec[x;y;%p](E(x, y);false;%p = 0)(c;{counter})") is expected


def test_lrec_with_free_node_variable(small_graph):
    text = "lrec[x;y;%p](E(x, y);false;%p = 0)(z;3)"
    assert holds(small_graph, text, {Var("z"): "u2"})
    assert not holds(small_graph, text, {Var("z"): "u1"})


def test_lrec_quotient_merges_everything(small_graph):
    # a single class with a self-loop alternates between levels
    text = "lrec[x;y;%p](E(x, y);true;%p = 0)(c;{})"
    assert holds(small_graph, text.format(0))
    assert not holds(small_graph, text.format(1))
    assert holds(small_graph, text.format(2))


def test_lrec_without_label_variables(small_graph):
    # C(v) = {0} where the label formula holds with no counter variables
    assert holds(small_graph, "lrec[x;y;](E(x, y);false;P(x))(c;)")
    assert not holds(small_graph, "lrec[x;y;](E(x, y);false;!P(x))(c;)")


def test_eval_lrec_requires_lrec_node(small_graph):
    with pytest.raises(TypeError):
        eval_lrec(parse_formula("P(c)", Vocabulary.from_structure(small_graph)), small_graph)


def test_lrec_respects_node_budget(small_graph):
    with pytest.raises(BudgetExceededError):
        holds(small_graph, "lrec[x;y;%p](E(x, y);false;%p = 0)(c;1)", budget=Budget(max_nodes=2))


# =============================================================================
# χ AND QUOTIENTS
# =============================================================================

def test_chi_counts_successors_at_scaled_levels():
    # v1 has in-degree 2, so v0 at level 3 looks at v1 at level 1
    g = LabelledGraph(("v0", "v1", "v2"), frozenset({("v0", "v1"), ("v2", "v1")}),
                      {"v0": frozenset({1}), "v1": frozenset({0})})
    assert chi(g, "v1", 5)
    assert not chi(g, "v0", 0)
    assert chi(g, "v0", 3)
    assert not chi(g, "v0", -1)


def test_chi_rejects_unknown_vertices():
    g = LabelledGraph(("v0",))
    with pytest.raises(ValueError):
        chi(g, "v9", 0)
    with pytest.raises(ValueError):
        LabelledGraph(("v0",), frozenset({("v0", "v1")}))


def test_chi_handles_deep_levels():
    vertices = tuple(f"v{i}" for i in range(3))
    g = LabelledGraph(vertices, frozenset({("v0", "v1"), ("v1", "v2"), ("v2", "v0")}),
                      {v: frozenset({0}) for v in vertices})
    assert chi(g, "v0", 5000) is (5000 % 2 == 0)


@pytest.mark.property_based
@given(labelled_graphs(), st.integers(min_value=-1, max_value=25), st.data())
@settings(max_examples=200)
def test_chi_agrees_with_direct_recursion(g, level, data):
    u = data.draw(st.sampled_from(g.vertices))
    assert chi(g, u, level) == naive_chi(g, u, level)


def test_quotient_numbers_classes_by_first_member():
    g = LabelledSemiGraph(("a", "b", "c"), frozenset({("a", "b")}), frozenset({("c", "a")}),
                          {"a": frozenset({1}), "c": frozenset({2})})
    q = quotient(g)
    assert q.classes == (("a", "c"), ("b",))
    assert q.class_of == {"a": 0, "b": 1, "c": 0}
    assert q.edges == frozenset({(0, 1)})
    assert q.labels == {0: frozenset({1, 2})}
    assert q.successors(0) == (1,)
    assert q.in_degree(1) == 1


def test_chi_hat_rejects_unknown_vertex():
    with pytest.raises(ValueError):
        chi_hat(LabelledSemiGraph(("a",)), "b", 0)


@pytest.mark.property_based
@given(semigraphs())
@settings(max_examples=200)
def test_quotient_matches_union_find(g):
    q = quotient(g)
    classes, edges, labels = union_find_quotient(g)
    block = {cid: frozenset(members) for cid, members in enumerate(q.classes)}
    assert set(block.values()) == classes
    assert {(block[a], block[b]) for a, b in q.edges} == edges
    assert {block[cid]: values for cid, values in q.labels.items()} == labels


@pytest.mark.property_based
@given(semigraphs(), st.integers(min_value=0, max_value=12), st.data())
@settings(max_examples=100)
def test_chi_hat_is_chi_on_the_quotient(g, level, data):
    u = data.draw(st.sampled_from(g.vertices))
    q = quotient(g)
    assert chi_hat(g, u, level) == naive_chi(q.graph, q.class_of[u], level)


# =============================================================================
# INTERPRETATIONS
# =============================================================================

def _formula(s, text):
    return parse_formula(text, Vocabulary.from_structure(s))


def test_interpretation_reverses_edges(small_graph):
    i = Interpretation(dimension=1, xs=(X,), relations={"E": ((X, Y), _formula(small_graph, "E(y, x)"))})
    image = apply_interpretation(i, small_graph)
    assert image.universe == ("u0", "u1", "u2")
    assert image.relation("E").tuples == frozenset({("u1", "u0"), ("u2", "u1")})


def test_interpretation_quotients_by_congruence(small_graph):
    same_p = _formula(small_graph, "(P(x) & P(y)) | (!P(x) & !P(y))")
    i = Interpretation(dimension=1, xs=(X,), epsilon=((X, Y), same_p),
                       relations={"Q": ((X,), _formula(small_graph, "P(x)"))})
    image = apply_interpretation(i, small_graph)
    assert image.universe == ("u0", "u1")
    assert image.relation("Q").tuples == frozenset({("u0",)})

    broken = Interpretation(dimension=1, xs=(X,), epsilon=((X, Y), same_p),
                            relations={"E": ((X, Y), _formula(small_graph, "E(x, y)"))})
    with pytest.raises(InterpretationError):
        apply_interpretation(broken, small_graph)


def test_interpretation_errors(small_graph):
    empty = Interpretation(dimension=1, xs=(X,), delta=_formula(small_graph, "false"))
    with pytest.raises(InterpretationError):
        apply_interpretation(empty, small_graph)
    needs_param = Interpretation(dimension=1, xs=(X,), params=(Y,), delta=_formula(small_graph, "E(y, x)"))
    with pytest.raises(InterpretationError):
        apply_interpretation(needs_param, small_graph)
    assert apply_interpretation(needs_param, small_graph, {Y: "u0"}).universe == ("u1",)
    with pytest.raises(InterpretationError):
        Interpretation(dimension=2, xs=(X,))


def test_semigraph_interpretation(small_graph):
    i = SemiGraphInterpretation(xs=(X,), ys=(Y,), edge=_formula(small_graph, "E(x, y)"),
                                sim=_formula(small_graph, "false"), ps=(Var("p", Sort.NUMBER),),
                                label=_formula(small_graph, "%p = 1"))
    g = apply_interpretation(i, small_graph)
    assert g.vertices == (("u0",), ("u1",), ("u2",))
    assert g.edges == frozenset({(("u0",), ("u1",)), (("u1",), ("u2",))})
    assert g.sim == frozenset()
    assert g.label(("u2",)) == frozenset({1})
