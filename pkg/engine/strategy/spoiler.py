"""
Spoiler agents: random, greedy, and the formula-driven Spoiler that plays
along a distinguishing formula.
"""
import logging

import numpy as np

from Backend.session_engine import GameSession
from engine.core.injections import PartialInjection, compose_injection, extends_partial_isomorphism
from engine.core.structures import decode_number_tuple, encode_number_tuple, tuple_elements
from engine.errors import NumberDomainError
from engine.eval.budget import NodeMode
from engine.eval.evaluator import Evaluator, build_semigraph
from engine.eval.semigraphs import QuotientGraph, quotient
from engine.game.agents import round_position
from engine.game.moves import ExtensionRequest, GameConfig, GraphOpen
from engine.logic.formulas import (
    And, Atom, Count, Exists, Forall, Formula, Lrec, Not, Or, Sort, Truth, Var,
)
from engine.logic.measures import free_variables

logger = logging.getLogger("lrec.strategy")

X, Y, P = Var("x1"), Var("y1"), Var("b1")
FALSE = Truth(False)


class RandomSpoiler:
    """
    Extension moves with random picks; with probability `graph_rate` a
    one-dimensional graph move whose edge is a random atom over x1, y1 and a
    pebbled parameter. At most `max_graph_moves` graph moves are opened per
    match, and a walk is left once the level is down to 1.
    """
    name = "random"

    def __init__(self, graph_rate: float = 0.25, exit_rate: float = 0.1, max_level: int = 8,
                 max_graph_moves: int = 2):
        self.graph_rate = graph_rate
        self.exit_rate = exit_rate
        self.max_level = max_level
        self.max_graph_moves = max_graph_moves

    def begin(self, config: GameConfig, rng: np.random.Generator) -> None:
        self._config = config
        self._rng = rng
        self._openings = 0

    def _choice(self, options):
        return options[int(self._rng.integers(len(options)))]

    def choose_move(self, session: GameSession):
        room = self._config.k - len(session.f)
        if room >= 2 and self._openings < self.max_graph_moves and self._rng.random() < self.graph_rate:
            self._openings += 1
            return self._graph_open(session)
        return ExtensionRequest()

    def _graph_open(self, session: GameSession) -> GraphOpen:
        beta = session.beta
        params = ((P, self._choice(beta)),) if beta else ()
        edge = self._random_atom(bool(params))
        sim = FALSE if self._rng.random() < 0.7 else self._random_atom(bool(params))
        starts = list(beta) + list(range(min(3, self._config.n) + 1))
        level = int(self._rng.integers(1, min(self.max_level, self._config.max_level) + 1))
        return GraphOpen(1, (X,), (Y,), edge, sim, (self._choice(starts),), level, params)

    def _random_atom(self, with_param: bool) -> Formula:
        vocab = self._config.a.relations
        name = self._choice(sorted(vocab))
        arity = vocab[name].arity
        if arity == 1:
            return And(Atom(name, (X,)), Atom(name, (Y,)))
        slots = [X, Y] + [P if with_param else X] * (arity - 2)
        order = self._rng.permutation(arity)
        return Atom(name, tuple(slots[i] for i in order))

    def pick(self, session: GameSession, g: PartialInjection) -> str:
        return self._choice([x for x in self._config.universe if x not in session.f])

    def graph_step(self, session: GameSession) -> tuple | None:
        gr = session.graph
        successors = gr.successors()
        if not successors or gr.level <= 1 or self._rng.random() < self.exit_rate:
            return None
        return self._choice(successors)


class GreedySpoiler(RandomSpoiler):
    """One-step look-ahead: take any move that breaks the partial isomorphism."""
    name = "greedy"

    def pick(self, session: GameSession, g: PartialInjection) -> str:
        cfg = self._config
        for x in cfg.universe:
            if x not in session.f and not extends_partial_isomorphism(session.f, x, g(x), cfg.a, cfg.b):
                return x
        return super().pick(session, g)

    def graph_step(self, session: GameSession) -> tuple | None:
        gr = session.graph
        if gr.h and not self._survives(session.f, gr.h):
            return None
        for b in gr.successors():
            if not self._survives(session.f, gr.response.h_family[tuple_elements(b)]):
                return b
        return super().graph_step(session)

    def _survives(self, f: PartialInjection, h: PartialInjection) -> bool:
        """Whether f ∪ h is a partial isomorphism, adding the pairs of h one at a time."""
        cfg = self._config
        grown = f
        for x, y in h.items():
            if not extends_partial_isomorphism(grown, x, y, cfg.a, cfg.b):
                return False
            if x not in grown:
                grown = compose_injection(grown, PartialInjection({x: y}))
        return True


class _LrecPlay:
    """The Spoiler's own labelled quotients for one graph move."""

    def __init__(self, phi: Lrec, env: dict, qa: QuotientGraph, qb: QuotientGraph):
        self.phi = phi
        self.env = env
        self.qa = qa
        self.qb = qb


class FormulaSpoiler(RandomSpoiler):
    """
    Plays along a formula that separates (A, env) from (B, f ∘ env).

    The goal is a subformula with an A-side assignment on which the two sides
    still disagree. Connectives descend into a disagreeing child; quantifiers
    and counting first try pebbled witnesses and numbers, then play an
    extension move and pick a disagreeing element under Duplicator's
    bijection; lrec nodes open the graph move and walk towards a successor
    whose χ-membership differs, or exit to the label formula when the
    successor counts agree. Without a goal it falls back to random picks.
    """
    name = "formula"

    def __init__(self, phi: Formula, env: dict | None = None):
        super().__init__(graph_rate=0.0, exit_rate=0.0)
        self.phi = phi
        self.env = dict(env or {})

    def begin(self, config: GameConfig, rng: np.random.Generator) -> None:
        super().begin(config, rng)
        self._ev_a = Evaluator(config.a, config.budget)
        self._ev_b = Evaluator(config.b, config.budget)
        self._goal: tuple | None = (self.phi, dict(self.env))
        self._quantifier: tuple | None = None
        self._lrec: _LrecPlay | None = None

    @property
    def goal(self) -> tuple | None:
        return self._goal

    # ==========================================
    # GOAL BOOKKEEPING
    # ==========================================
    @staticmethod
    def _image(env: dict, f: PartialInjection) -> dict:
        return {var: f.get(value) for var, value in env.items()}

    def _differs(self, phi: Formula, env_a: dict, env_b: dict) -> bool:
        return self._ev_a.holds(phi, env_a) != self._ev_b.holds(phi, env_b)

    def _descend(self, session: GameSession) -> str | None:
        """Walk the goal down without moves; returns "extension", "lrec" or None."""
        while self._goal is not None:
            phi, env = self._goal
            env_b = self._image(env, session.f)
            match phi:
                case Not(body):
                    self._goal = (body, env)
                case And(left, right) | Or(left, right):
                    self._goal = (left if self._differs(left, env, env_b) else right, env)
                case Exists(var, body) | Forall(var, body) | Count(var, body, _):
                    if self._descend_quantifier(session, var, body, env, env_b):
                        continue
                    if var.sort is Sort.NUMBER:
                        self._goal = None
                        return None
                    self._quantifier = (var, body, env)
                    return "extension"
                case Lrec():
                    return "lrec"
                case _:
                    return None
        return None

    def _descend_quantifier(self, session, var: Var, body: Formula, env: dict, env_b: dict) -> bool:
        if var.sort is Sort.NUMBER:
            witnesses = [(m, m) for m in self._config.a.number_domain.values()]
        else:
            witnesses = list(session.f.items())
        for a, b in witnesses:
            if self._differs(body, {**env, var: a}, {**env_b, var: b}):
                self._goal = (body, {**env, var: a})
                return True
        return False

    # ==========================================
    # MOVES
    # ==========================================
    def choose_move(self, session: GameSession):
        if self._descend(session) == "lrec":
            return self._open(session)
        return ExtensionRequest()

    def pick(self, session: GameSession, g: PartialInjection) -> str:
        if self._quantifier is not None:
            var, body, env = self._quantifier
            self._quantifier = None
            env_b = self._image(env, session.f)
            for u in self._config.universe:
                if u not in session.f and self._differs(body, {**env, var: u}, {**env_b, var: g(u)}):
                    self._goal = (body, {**env, var: u})
                    return u
            logger.debug("[Spoiler] No disagreeing witness under g; playing on at random")
        self._goal = None
        return super().pick(session, g)

    def _open(self, session: GameSession) -> GraphOpen:
        phi, env = self._goal
        pair_vars = set(phi.us) | set(phi.vs)
        outer = {v: env[v] for v in (free_variables(phi.edge) | free_variables(phi.sim)) - pair_vars}
        label_outer = {v: env[v] for v in free_variables(phi.label) - set(phi.us) - set(phi.ps)}
        start = tuple(self._ev_a.value(w, env) for w in phi.ws)
        level = encode_number_tuple(tuple(self._ev_a.value(r, env) for r in phi.rs), self._config.n)

        graph_env = {**outer, **label_outer}
        qa = quotient(build_semigraph(self._ev_a, phi.us, phi.vs, phi.edge, phi.sim, graph_env,
                                      mode=NodeMode.UNTYPED, label=(phi.ps, phi.label)))
        qb = quotient(build_semigraph(self._ev_b, phi.us, phi.vs, phi.edge, phi.sim,
                                      self._image(graph_env, session.f),
                                      mode=NodeMode.UNTYPED, label=(phi.ps, phi.label)))
        self._lrec = _LrecPlay(phi, env, qa, qb)
        if level == 0:
            self._exit_to_label(start, 0)
        params = tuple(sorted(outer.items(), key=lambda kv: str(kv[0])))
        return GraphOpen(phi.c, phi.us, phi.vs, phi.edge, phi.sim, start, level, params)

    def _exit_to_label(self, node: tuple, m: int):
        play = self._lrec
        self._lrec = None
        phi = play.phi
        try:
            code = decode_number_tuple(m, self._config.n, len(phi.ps))
        except NumberDomainError:
            self._goal = None
            return
        self._goal = (phi.label, {**play.env, **dict(zip(phi.us, node)), **dict(zip(phi.ps, code))})

    @staticmethod
    def _count(q: QuotientGraph, node: tuple, level: int) -> int:
        cid = q.class_of[node]
        return sum(1 for s in q.successors(cid) if q.chi.holds(s, (level - 1) // q.in_degree(s)))

    def graph_step(self, session: GameSession) -> tuple | None:
        play = self._lrec
        if play is None:
            return super().graph_step(session)
        gr = session.graph
        node_b = round_position(session).apply(gr.node)
        m_a = self._count(play.qa, gr.node, gr.level)
        if m_a == self._count(play.qb, node_b, gr.level):
            self._exit_to_label(gr.node, m_a)
            return None

        family = gr.response.h_family
        for b in gr.successors():
            level = (gr.level - 1) // gr.quotient_a.in_degree(gr.quotient_a.class_of[b])
            hb = family[tuple_elements(b)].apply(b)
            if play.qa.holds(b, level) != play.qb.holds(hb, level):
                if level == 0:
                    self._exit_to_label(b, 0)
                return b
        logger.debug("[Spoiler] No disagreeing successor; stepping at random")
        self._lrec = None
        self._goal = None
        return super().graph_step(session)


__all__ = ["FormulaSpoiler", "GreedySpoiler", "RandomSpoiler"]
