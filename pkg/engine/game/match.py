"""
Running and replaying matches.

run_match drives a GameSession with two agents and records every submitted
move. An agent that raises a WorkbenchError, or submits a move the session
rejects, forfeits; the forfeit is recorded like any other move so the
transcript replays to the same outcome.
"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from Backend.session_engine import GameSession
from Backend.states import Actor, GamePhase, Outcome, Pending
from engine.core.injections import PartialInjection
from engine.core.structures import structure_from_json, structure_to_json
from engine.errors import IllegalMoveError, TranscriptError, WorkbenchError
from engine.eval.budget import Budget
from engine.game.agents import DuplicatorAgent, SpoilerAgent
from engine.game.moves import (
    MAX_MATCH_TURNS, Bijection, Forfeit, GameConfig, GraphExit, GraphStep, Move, Pick, move_from_json,
)
from engine.game.transcript import Transcript, TranscriptHeader
from engine.logic.formulas import Vocabulary

logger = logging.getLogger("lrec.game")


@dataclass
class MatchResult:
    outcome: Outcome
    reason: str
    transcript: Transcript
    session: GameSession

    @property
    def spoiler_won(self) -> bool:
        return self.outcome is Outcome.SPOILER_WINS


def make_header(config: GameConfig, seed: int | None, agents: dict, f0: PartialInjection | None = None) -> TranscriptHeader:
    return TranscriptHeader(
        seed=seed,
        k=config.k,
        q=config.q,
        agents=agents,
        structures={"A": structure_to_json(config.a), "B": structure_to_json(config.b)},
        f0=[tuple(pair) for pair in (f0 or PartialInjection.empty()).to_json()],
        budget={"max_nodes": config.budget.max_nodes, "max_pairs": config.budget.max_pairs},
    )


class MoveRecorder:
    """Applies moves to the session and appends them to the transcript."""

    def __init__(self, session: GameSession, transcript: Transcript):
        self.session = session
        self.transcript = transcript

    def play(self, actor: Actor, move: Move):
        self.session.apply(actor, move)
        self.transcript.append(actor.value, move.to_json(), self.session.state_hash())

    def turn(self, actor: Actor, produce: Callable[[], Move]):
        """Ask `actor` for a move and play it; any engine error becomes a forfeit."""
        try:
            move = produce()
            self.play(actor, move)
        except IllegalMoveError as exc:
            self._forfeit(exc.actor, exc.reason)
        except WorkbenchError as exc:
            self._forfeit(actor, f"{type(exc).__name__}: {exc}")

    def _forfeit(self, actor: Actor, reason: str):
        logger.debug("[Game] %s forfeits: %s", actor.name, reason)
        self.play(actor, Forfeit(reason))


def run_match(config: GameConfig, spoiler: SpoilerAgent, duplicator: DuplicatorAgent, seed: int,
              f0: PartialInjection | None = None) -> MatchResult:
    """
    Play one match to completion. Deterministic given the seed: both agents
    draw from children of one np.random.default_rng(seed).
    """
    spoiler_rng, duplicator_rng = np.random.default_rng(seed).spawn(2)
    spoiler.begin(config, spoiler_rng)
    duplicator.begin(config, duplicator_rng)

    session = GameSession.start(config, f0)
    transcript = Transcript(make_header(config, seed, {"spoiler": spoiler.name, "duplicator": duplicator.name}, f0))
    rec = MoveRecorder(session, transcript)

    while not session.is_finished:
        if session.phase is GamePhase.MAIN:
            if session.turns >= MAX_MATCH_TURNS:
                rec.play(Actor.SPOILER, Forfeit(f"no win within {MAX_MATCH_TURNS} moves"))
                break
            rec.turn(Actor.SPOILER, lambda: spoiler.choose_move(session))
            if session.is_finished or session.pending is not Pending.EXTENSION_REQUESTED:
                continue
            rec.turn(Actor.DUPLICATOR, lambda: Bijection(duplicator.extension_response(session)))
            if session.is_finished:
                continue
            rec.turn(Actor.SPOILER, lambda: Pick(spoiler.pick(session, session.offer)))
        elif session.pending is Pending.ROUND_OPEN:
            rec.turn(Actor.DUPLICATOR, lambda: duplicator.graph_response(session))
        else:
            rec.turn(Actor.SPOILER, lambda: _graph_move(spoiler.graph_step(session)))

    logger.debug("[Game] Match over after %d moves: %s (%s)", len(transcript), session.outcome.name, session.reason)
    return MatchResult(session.outcome, session.reason, transcript, session)


def _graph_move(node: tuple | None) -> Move:
    return GraphExit() if node is None else GraphStep(tuple(node))


def config_from_header(header: TranscriptHeader) -> tuple[GameConfig, PartialInjection]:
    a = structure_from_json(header.structures["A"])
    b = structure_from_json(header.structures["B"])
    budget = Budget(header.budget.max_nodes, header.budget.max_pairs)
    return GameConfig(a, b, header.k, header.q, budget), PartialInjection.from_json(header.f0)


def replay(transcript: Transcript) -> GameSession:
    """
    Re-apply every recorded move and compare state hashes.

    Raises:
        TranscriptError: a move is rejected or a state hash differs
    """
    config, f0 = config_from_header(transcript.header)
    vocab = Vocabulary.from_structure(config.a)
    session = GameSession.start(config, f0)
    for line in transcript.lines:
        move = move_from_json(line.move, vocab)
        try:
            session.apply(Actor(line.actor), move)
        except (IllegalMoveError, PermissionError) as exc:
            raise TranscriptError(f"round {line.round}: {exc}") from exc
        if session.state_hash() != line.state_hash:
            raise TranscriptError(f"round {line.round}: state hash mismatch")
    return session
