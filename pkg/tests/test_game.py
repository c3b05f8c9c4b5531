"""The bijective k-step q-degree game: session rules, matches, transcripts and the oracle."""
import pytest

from Backend.session_engine import GameSession
from Backend.states import Actor, GamePhase, Outcome, Pending
from engine.core.injections import PartialInjection
from engine.core.structures import Structure
from engine.errors import ConfigError, ConstantMismatchError, IllegalMoveError, OracleLimitError, TranscriptError
from engine.game import (
    Bijection, ExtensionRequest, GameConfig, GraphExit, GraphOpen, GraphResponse, GraphStep, Pick, Transcript,
    bijection_game_oracle, move_from_json,
)
from engine.game.agents import IdentityDuplicator, restriction_family
from engine.game.match import replay, run_match
from engine.logic.formulas import Var, Vocabulary
from engine.logic.parser import parse_formula
from engine.strategy import RandomSpoiler
from engine.verify.fixtures import oracle_pairs

UNIVERSE = ["u0", "u1", "u2"]
X, Y = Var("x"), Var("y")


def coloured(*marked) -> Structure:
    return Structure.build(UNIVERSE, {"P": (1, [(m,) for m in marked])})


def path(edges, constant="u0") -> Structure:
    return Structure.build(UNIVERSE, {"E": (2, edges)}, {"c": constant})


def swap(a, b) -> PartialInjection:
    pairs = {x: x for x in UNIVERSE}
    pairs[a], pairs[b] = b, a
    return PartialInjection(pairs)


def graph_open(s: Structure, edge: str, level: int, start=("u0",), c: int = 1) -> GraphOpen:
    vocab = Vocabulary.from_structure(s)
    xs = tuple(Var(f"x{i}") for i in range(c)) if c > 1 else (X,)
    ys = tuple(Var(f"y{i}") for i in range(c)) if c > 1 else (Y,)
    return GraphOpen(c, xs, ys, parse_formula(edge, vocab), parse_formula("false", vocab), start, level)


def respond_identity(session: GameSession):
    g = PartialInjection.identity(UNIVERSE)
    session.apply(Actor.DUPLICATOR, GraphResponse(g, restriction_family(session, g)))


# =============================================================================
# CONFIGURATION AND START
# =============================================================================

def test_config_needs_shared_universe_and_vocabulary():
    with pytest.raises(ConfigError):
        GameConfig(coloured("u0"), Structure.build(["u0", "u1"], {"P": (1, [])}), 2, 0)
    with pytest.raises(ConfigError):
        GameConfig(coloured("u0"), path([]), 2, 0)
    with pytest.raises(ConfigError):
        GameConfig(coloured("u0"), coloured("u1"), -1, 0)


def test_max_level():
    assert GameConfig(coloured(), coloured(), 2, 2).max_level == 15


def test_constants_are_pebbled_at_start():
    session = GameSession.start(GameConfig(path([]), path([], "u1"), 3, 0))
    assert session.f.pairs == {"u0": "u1"}
    assert session.beta == ("u0",)
    with pytest.raises(ConstantMismatchError):
        GameSession.start(GameConfig(path([]), path([]), 3, 0), PartialInjection({"u0": "u2"}))


def test_start_position_can_already_be_lost():
    session = GameSession.start(GameConfig(path([("u0", "u0")]), path([]), 3, 0))
    assert session.outcome is Outcome.SPOILER_WINS


# =============================================================================
# EXTENSION MOVES
# =============================================================================

def test_extension_move_until_k_pebbles():
    session = GameSession.start(GameConfig(coloured("u0"), coloured("u1"), 2, 0))
    session.apply(Actor.SPOILER, ExtensionRequest())
    assert session.pending is Pending.EXTENSION_REQUESTED
    session.apply(Actor.DUPLICATOR, Bijection(swap("u0", "u1")))
    session.apply(Actor.SPOILER, Pick("u0"))
    assert session.f.pairs == {"u0": "u1"}
    assert session.phase is GamePhase.MAIN

    session.apply(Actor.SPOILER, ExtensionRequest())
    with pytest.raises(IllegalMoveError) as exc:
        session.apply(Actor.DUPLICATOR, Bijection(PartialInjection.identity(UNIVERSE)))
    assert exc.value.actor is Actor.DUPLICATOR
    session.apply(Actor.DUPLICATOR, Bijection(swap("u0", "u1")))
    session.apply(Actor.SPOILER, Pick("u2"))
    assert session.outcome is Outcome.DUPLICATOR_WINS


def test_bad_bijection_loses_on_pick():
    session = GameSession.start(GameConfig(coloured("u0"), coloured("u1"), 2, 0))
    session.apply(Actor.SPOILER, ExtensionRequest())
    session.apply(Actor.DUPLICATOR, Bijection(PartialInjection.identity(UNIVERSE)))
    session.apply(Actor.SPOILER, Pick("u0"))
    assert session.outcome is Outcome.SPOILER_WINS
    assert session.is_finished


def test_moves_out_of_turn_are_rejected():
    session = GameSession.start(GameConfig(coloured("u0"), coloured("u1"), 2, 0))
    with pytest.raises(IllegalMoveError) as exc:
        session.apply(Actor.DUPLICATOR, ExtensionRequest())
    assert exc.value.actor is Actor.DUPLICATOR
    with pytest.raises(IllegalMoveError):
        session.apply(Actor.DUPLICATOR, Bijection(PartialInjection.identity(UNIVERSE)))
    session.apply(Actor.SPOILER, ExtensionRequest())
    with pytest.raises(IllegalMoveError):
        session.apply(Actor.DUPLICATOR, Bijection(PartialInjection({"u0": "u1"})))
    session.apply(Actor.DUPLICATOR, Bijection(swap("u0", "u1")))
    with pytest.raises(IllegalMoveError):
        session.apply(Actor.SPOILER, Pick("u9"))


def test_finished_session_is_locked_until_reset():
    session = GameSession.start(GameConfig(coloured("u0"), coloured("u1"), 2, 0))
    session.apply(Actor.SPOILER, ExtensionRequest())
    session.apply(Actor.DUPLICATOR, Bijection(PartialInjection.identity(UNIVERSE)))
    session.apply(Actor.SPOILER, Pick("u0"))
    with pytest.raises(PermissionError):
        session.apply(Actor.SPOILER, ExtensionRequest())
    session.reset_session()
    assert session.outcome is Outcome.UNDECIDED
    assert len(session.f) == 0


# =============================================================================
# GRAPH MOVES
# =============================================================================

def test_graph_move_walks_down_the_counter():
    s = path([("u0", "u1"), ("u1", "u2")])
    session = GameSession.start(GameConfig(s, s, 4, 1))
    session.apply(Actor.SPOILER, graph_open(s, "E(x, y)", 3))
    assert session.phase is GamePhase.GRAPH_ROUND
    assert session.graph.level == 3
    assert ("u1",) in session.graph.successors()

    respond_identity(session)
    with pytest.raises(IllegalMoveError):
        session.apply(Actor.SPOILER, GraphStep(("u2",)))
    session.apply(Actor.SPOILER, GraphStep(("u1",)))
    assert session.graph.level == 2
    respond_identity(session)
    session.apply(Actor.SPOILER, GraphStep(("u2",)))
    assert session.graph.level == 1
    respond_identity(session)
    session.apply(Actor.SPOILER, GraphExit())

    assert session.phase is GamePhase.MAIN
    assert session.f.pairs == {"u0": "u0", "u2": "u2"}
    assert session.outcome is Outcome.UNDECIDED


def test_graph_round_condition_failure():
    a, b = path([("u0", "u1")]), path([("u1", "u2")])
    session = GameSession.start(GameConfig(a, b, 4, 1))
    session.apply(Actor.SPOILER, graph_open(a, "E(x, y)", 1))
    respond_identity(session)
    assert session.outcome is Outcome.SPOILER_WINS
    assert "condition (a)" in session.reason


def test_level_zero_graph_move_returns_immediately():
    s = path([("u0", "u1")])
    session = GameSession.start(GameConfig(s, s, 4, 1))
    session.apply(Actor.SPOILER, graph_open(s, "E(x, y)", 0))
    assert session.phase is GamePhase.MAIN
    assert session.turns == 1


@pytest.mark.parametrize("edge,level,start,c", [
    ("E(x, y)", 1, ("u0",), 2),
    ("exists z. exists w. E(z, w) & E(x, y)", 1, ("u0",), 1),
    ("E(x, y)", 1, ("u1",), 1),
    ("E(x, y)", 99, ("u0",), 1),
])
def test_illegal_graph_openings(edge, level, start, c):
    s = path([("u0", "u1")])
    session = GameSession.start(GameConfig(s, s, 4, 1))
    with pytest.raises(IllegalMoveError) as exc:
        session.apply(Actor.SPOILER, graph_open(s, edge, level, start, c))
    assert exc.value.actor is Actor.SPOILER


# =============================================================================
# MATCHES AND TRANSCRIPTS
# =============================================================================

def test_identity_duplicator_holds_identical_structures():
    s = path([("u0", "u1"), ("u1", "u2")])
    result = run_match(GameConfig(s, s, 3, 1), RandomSpoiler(), IdentityDuplicator(), seed=7)
    assert result.outcome is Outcome.DUPLICATOR_WINS
    assert not result.spoiler_won


def test_matches_are_deterministic_and_replay():
    config = GameConfig(path([("u0", "u1")]), path([("u1", "u2")]), 3, 1)
    first = run_match(config, RandomSpoiler(), IdentityDuplicator(), seed=11)
    second = run_match(config, RandomSpoiler(), IdentityDuplicator(), seed=11)
    assert first.transcript.to_jsonl() == second.transcript.to_jsonl()
    session = replay(Transcript.from_jsonl(first.transcript.to_jsonl()))
    assert session.outcome is first.outcome
    assert session.state_hash() == first.session.state_hash()


def test_tampered_transcript_fails_replay():
    s = path([("u0", "u1"), ("u1", "u2")])
    transcript = run_match(GameConfig(s, s, 3, 1), RandomSpoiler(), IdentityDuplicator(), seed=3).transcript
    last = transcript.lines[-1].model_copy(update={"state_hash": "0" * 64})
    with pytest.raises(TranscriptError):
        replay(Transcript(transcript.header, transcript.lines[:-1] + [last]))


@pytest.mark.parametrize("text", [
    "",
    '{"round": 0}',
    '{"header": {"k": 1}}',
])
def test_malformed_transcripts(text):
    with pytest.raises(TranscriptError):
        Transcript.from_jsonl(text)


def test_unknown_move_type():
    with pytest.raises(TranscriptError):
        move_from_json({"type": "teleport"}, Vocabulary())
    with pytest.raises(TranscriptError):
        move_from_json({"type": "pick"}, Vocabulary())


# =============================================================================
# BIJECTION-GAME ORACLE
# =============================================================================

@pytest.mark.parametrize("name,a,b,rounds,expected", oracle_pairs(), ids=[p[0] for p in oracle_pairs()])
def test_oracle_fixtures(name, a, b, rounds, expected):
    assert bijection_game_oracle(a, b, rounds) is expected


def test_oracle_limits():
    big = Structure.build([f"e{i}" for i in range(7)], {})
    with pytest.raises(OracleLimitError):
        bijection_game_oracle(big, big, 1)
    small = coloured()
    with pytest.raises(OracleLimitError):
        bijection_game_oracle(small, small, 4)
