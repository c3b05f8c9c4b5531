"""Offset bijections, the offset Duplicator, the formula Spoiler and the harness."""
import logging
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from Backend.session_engine import GameSession
from Backend.states import Outcome
from engine.core.injections import PartialInjection, compose_injection
from engine.errors import ConfigError, InconsistentOffsetError, TreeError
from engine.eval import Evaluator
from engine.game import MAX_MATCH_TURNS, GameConfig, GraphOpen
from engine.game.match import run_match
from engine.logic.formulas import Var, Vocabulary
from engine.logic.parser import parse_formula
from engine.psp import TreeGroupSpec, generate_instance, shifted
from engine.strategy import (
    FormulaSpoiler, OffsetDuplicator, RandomSpoiler, duplicator_extension_response, duplicator_graph_response,
    guarantee_size, make_duplicator, make_spoiler, null_height, offset_bijection, rho_from_injection, run_harness,
    shift_tuple, spike_closure, tuple_nodes,
)
from engine.treecomb import BinTree, OffsetFn
from engine.verify.fixtures import SENTENCE_SPEC, distinguishing_fixtures, sentence_suite

FIXTURES = distinguishing_fixtures()
FIXTURE_MATCHES = [
    (fixture, duplicator)
    for fixture in FIXTURES
    for duplicator in ["identity", "random"] + (["paper"] if fixture.spec is not None else [])
]


@st.composite
def total_offsets(draw):
    t = BinTree(draw(st.integers(min_value=1, max_value=3)))
    p = draw(st.sampled_from([3, 5, 7]))
    return t, p, [OffsetFn(p, {v: draw(st.integers(0, p - 1)) for v in t.nodes()}) for _ in range(2)]


# =============================================================================
# OFFSETS AS BIJECTIONS
# =============================================================================

def test_offset_bijection_shifts_residues():
    g = offset_bijection(OffsetFn(3, {1: 1, 2: 0}), [1, 2])
    assert g("n1_r0") == "n1_r1"
    assert g("n1_r2") == "n1_r0"
    assert g("n2_r1") == "n2_r1"
    with pytest.raises(TreeError):
        offset_bijection(OffsetFn(3, {1: 1}), [1, 2])


@pytest.mark.property_based
@given(total_offsets())
@settings(max_examples=100)
def test_offset_bijections_compose_by_addition(case):
    t, p, (rho, sigma) = case
    joined = offset_bijection(OffsetFn(p, {v: rho[v] + sigma[v] for v in t.nodes()}), t.nodes())
    first, second = offset_bijection(rho, t.nodes()), offset_bijection(sigma, t.nodes())
    assert all(second(first(e)) == joined(e) for e in joined.domain)


def test_offsets_read_back_from_positions():
    rho = OffsetFn(3, {1: 2, 3: 1})
    f = offset_bijection(rho, [1, 3]).restrict(["n1_r0", "n3_r2"])
    assert rho_from_injection(f, 3).values == rho.values
    assert rho_from_injection(PartialInjection({"n1_r0": "n2_r0"}), 3) is None
    assert rho_from_injection(PartialInjection({"n1_r0": "n1_r1", "n1_r1": "n1_r0"}), 3) is None
    assert rho_from_injection(PartialInjection({"u0": "u0"}), 3) is None


def test_offset_helpers(tree3):
    assert null_height(tree3, OffsetFn(3, {2: 0})) == math.inf
    assert null_height(tree3, OffsetFn(3, {2: 1, 8: 1})) == -1
    assert null_height(tree3, OffsetFn(3, {2: 1})) == 1
    assert shift_tuple(OffsetFn(3, {1: 1}), ("n1_r0", 3, "n2_r1")) == ("n1_r1", 3, "n2_r1")
    assert tuple_nodes(("n1_r0", 3, "n12_r1")) == frozenset({1, 12})
    assert guarantee_size(1, 0) == 2


def test_spike_closure(tree3):
    assert spike_closure(tree3, 3, [4, 8, 9], 8) is None
    closed = spike_closure(tree3, 3, [4, 8], 8)
    assert closed.values == {4: 0, 8: 1, 9: 2}


# =============================================================================
# DUPLICATOR
# =============================================================================

def test_extension_response_extends_the_position():
    t = BinTree(2)
    g = duplicator_extension_response(t, PartialInjection({"n1_r1": "n1_r2"}), 3)
    assert g.is_bijection_on([f"n{v}_r{a}" for v in t.nodes() for a in range(3)])
    assert g("n1_r0") == "n1_r1"
    assert g("n5_r2") == "n5_r2"
    with pytest.raises(InconsistentOffsetError):
        duplicator_extension_response(t, PartialInjection({"n1_r0": "n2_r0"}), 3)


def test_offset_duplicator_plays_a_full_match(small_spec):
    a = generate_instance(small_spec).structure
    b = generate_instance(shifted(small_spec)).structure
    config = GameConfig(a, b, 3, 0)
    result = run_match(config, make_spoiler("greedy"), OffsetDuplicator(small_spec), seed=5)
    assert result.session.is_finished
    assert result.outcome is Outcome.DUPLICATOR_WINS, result.reason
    assert len(result.transcript) >= 1
    assert result.session.f("n1_r1") == "n1_r2"


def test_graph_response_maps_come_from_one_shift(small_spec, psp_pair):
    a, b = psp_pair
    session = GameSession.start(GameConfig(a, b, 3, 1))
    vocab = Vocabulary.from_structure(a)
    edge = parse_formula("R(x1, y1, t) | R(y1, x1, t)", vocab)
    session.open_graph_move(GraphOpen(1, (Var("x1"),), (Var("y1"),), edge, parse_formula("false", vocab), (0,), 3))
    response = duplicator_graph_response(BinTree(small_spec.h), small_spec.p, session)

    joined = PartialInjection.empty()
    for y, h_y in response.h_family.items():
        assert h_y.domain == y
        joined = compose_injection(joined, h_y)
    assert joined.domain == a.element_set
    assert frozenset() in response.h_family


def test_random_spoiler_leaves_graph_moves_it_cannot_win(small_spec, psp_pair):
    config = GameConfig(*psp_pair, 3, 1)
    for seed in range(4):
        spoiler = RandomSpoiler(graph_rate=1.0, exit_rate=0.0)
        result = run_match(config, spoiler, make_duplicator("paper", small_spec), seed=seed)
        opened = [line for line in result.transcript.lines if line.move["type"] == "graph-open"]
        assert len(opened) <= spoiler.max_graph_moves
        assert len(result.transcript) < MAX_MATCH_TURNS
        assert f"no win within {MAX_MATCH_TURNS}" not in result.reason


# =============================================================================
# FORMULA SPOILER AND FIXTURES
# =============================================================================

@pytest.mark.parametrize("fixture", FIXTURES, ids=[f.name for f in FIXTURES])
def test_fixture_formula_separates_structures(fixture):
    assert Evaluator(fixture.a).holds(fixture.phi) != Evaluator(fixture.b).holds(fixture.phi)


@pytest.mark.parametrize("fixture,duplicator", FIXTURE_MATCHES,
                         ids=[f"{f.name}-{d}" for f, d in FIXTURE_MATCHES])
def test_formula_spoiler_wins_fixture(fixture, duplicator):
    config = GameConfig(fixture.a, fixture.b, fixture.k, fixture.q)
    result = run_match(config, FormulaSpoiler(fixture.phi), make_duplicator(duplicator, fixture.spec), seed=17)
    assert result.spoiler_won, result.reason


@pytest.mark.slow
def test_low_rank_sentences_agree_on_shifted_instances():
    h, p = SENTENCE_SPEC["h"], SENTENCE_SPEC["p"]
    sigma = [i % p for i in range(2 ** h)]
    spec = TreeGroupSpec(h=h, p=p, sigma=sigma, t=sum(sigma) % p)
    ev_a = Evaluator(generate_instance(spec).structure)
    ev_b = Evaluator(generate_instance(shifted(spec)).structure)
    for phi in sentence_suite():
        assert ev_a.holds(phi) == ev_b.holds(phi)


# =============================================================================
# REGISTRY AND HARNESS
# =============================================================================

def test_registry_rejects_unknown_or_incomplete_agents():
    with pytest.raises(ConfigError):
        make_spoiler("formula")
    with pytest.raises(ConfigError):
        make_spoiler("clever")
    with pytest.raises(ConfigError):
        make_duplicator("offset")
    with pytest.raises(ConfigError):
        make_duplicator("paper")
    with pytest.raises(ConfigError):
        make_duplicator("clever")


def test_harness_tables(small_spec, caplog):
    with caplog.at_level(logging.WARNING, logger="lrec.strategy"):
        result = run_harness(small_spec, k=3, q=1, matches=2, seed=1)
    assert "below the proven size" in caplog.text
    assert len(result.rows) == 4
    assert set(result.rows["spoiler"]) == {"random", "greedy"}
    assert list(result.summary.index) == ["greedy", "random"]
    assert result.summary["matches"].tolist() == [2, 2]
    assert (result.summary["duplicator_wins"] + result.summary["spoiler_wins"]).le(2).all()
    assert result.duplicator_losses == int((result.rows["outcome"] != "DUPLICATOR_WINS").sum())
    assert result.duplicator_losses == 0, result.rows["reason"].tolist()


@pytest.mark.slow
@pytest.mark.parametrize("h,p", [(6, 5), (6, 7)])
def test_harness_matches_finish_quickly_at_desk_scale(h, p):
    sigma = [(3 * i + 1) % p for i in range(2 ** h)]
    spec = TreeGroupSpec(h=h, p=p, sigma=sigma, t=sum(sigma) % p)
    result = run_harness(spec, k=3, q=1, matches=2, seed=0)
    assert result.duplicator_losses == 0, result.rows["reason"].tolist()
    assert (result.rows["seconds"] < 5.0).all(), result.rows["seconds"].tolist()
