import hashlib
import logging
from dataclasses import dataclass, replace

from Backend.states import Actor, GamePhase, Outcome, Pending
from engine.core.injections import PartialInjection, compose_injection, is_partial_isomorphism
from engine.core.structures import format_tuple, tuple_elements
from engine.errors import (
    BudgetExceededError, ConstantMismatchError, IllegalMoveError, InjectionError,
)
from engine.eval.budget import NodeMode
from engine.eval.evaluator import Evaluator, build_semigraph
from engine.eval.semigraphs import LabelledSemiGraph, QuotientGraph, quotient
from engine.game.moves import (
    Bijection, ExtensionRequest, Forfeit, GameConfig, GraphExit, GraphOpen, GraphResponse, GraphStep, Move, Pick,
)
from engine.game.transcript import canonical_json
from engine.logic.measures import free_variables, iteration_degree, rank

logger = logging.getLogger("lrec.game")


@dataclass(frozen=True)
class GraphRound:
    """Position inside a graph move: the current node ā_i, h_i and ℓ_i."""
    opening: GraphOpen
    beta: tuple
    semigraph_a: LabelledSemiGraph
    semigraph_b: LabelledSemiGraph
    quotient_a: QuotientGraph
    quotient_b: QuotientGraph
    node: tuple
    h: PartialInjection
    level: int
    index: int = 0
    response: GraphResponse | None = None

    __hash__ = None

    @property
    def c(self) -> int:
        return self.opening.c

    @property
    def nodes(self) -> tuple:
        return self.semigraph_a.vertices

    def successors(self) -> tuple:
        """Concrete nodes whose class is a [E_A]-successor of the class of ā_i."""
        qa = self.quotient_a
        return tuple(v for cid in qa.successors(qa.class_of[self.node]) for v in qa.classes[cid])


class GameSession:
    """
    The k-step, q-degree game as a forward-only state machine.

    Every move is either applied or rejected with IllegalMoveError naming the
    player at fault; nothing is normalized. Once the outcome is fixed the
    session is locked until reset_session().
    """

    def __init__(self, config: GameConfig, f0: PartialInjection | None = None):
        self._config = config
        self._f0 = f0 or PartialInjection.empty()
        self._start()

    @classmethod
    def start(cls, config: GameConfig, f0: PartialInjection | None = None) -> "GameSession":
        """
        Raises:
            ConstantMismatchError: if f0 disagrees with the constants
        """
        return cls(config, f0)

    def _start(self):
        self._phase = GamePhase.MAIN
        self._outcome = Outcome.UNDECIDED
        self._reason = ""
        self._pending = Pending.NONE
        self._offer: PartialInjection | None = None
        self._graph: GraphRound | None = None
        self._turns = 0

        pairs = dict(self._f0.pairs)
        a, b = self._config.a, self._config.b
        for name in sorted(a.constants):
            ea, eb = a.constants[name], b.constants[name]
            if pairs.get(ea, eb) != eb:
                raise ConstantMismatchError(f"f0 maps constant {name} ({ea}) to {pairs[ea]}, not {eb}")
            pairs[ea] = eb
        try:
            self._f = PartialInjection(pairs)
        except InjectionError as exc:
            raise ConstantMismatchError(f"constants cannot be pebbled: {exc}") from exc
        self._f.check_universe(self._config.universe)
        logger.debug("[Game] Session started with %d pebbles (k=%d, q=%d)", len(self._f), self._config.k, self._config.q)
        self._settle()

    # ==========================================
    # PROPERTIES
    # ==========================================
    @property
    def config(self) -> GameConfig:
        return self._config

    @property
    def phase(self) -> GamePhase:
        return self._phase

    @property
    def outcome(self) -> Outcome:
        return self._outcome

    @property
    def reason(self) -> str:
        return self._reason

    @property
    def f(self) -> PartialInjection:
        return self._f

    @property
    def beta(self) -> tuple:
        return tuple(sorted(self._f.domain))

    @property
    def pending(self) -> Pending:
        return self._pending

    @property
    def offer(self) -> PartialInjection | None:
        return self._offer

    @property
    def graph(self) -> GraphRound | None:
        return self._graph

    @property
    def turns(self) -> int:
        return self._turns

    @property
    def is_finished(self) -> bool:
        return self._phase is GamePhase.FINISHED

    # ==========================================
    # THE GATEKEEPER
    # ==========================================
    def _require(self, actor: Actor, phase: GamePhase, pending: Pending, what: str):
        if self.is_finished:
            raise PermissionError(
                f"ACCESS DENIED: match is over ({self._outcome.name}). "
                "You must call reset_session() before playing again.")
        if self._phase is not phase or self._pending is not pending:
            raise IllegalMoveError(actor, f"{what} is not allowed in {self._phase.name}/{self._pending.name}")

    def _finish(self, outcome: Outcome, reason: str):
        self._outcome = outcome
        self._reason = reason
        self._phase = GamePhase.FINISHED
        self._pending = Pending.NONE
        self._offer = None
        self._graph = None
        logger.debug("[Game] State -> FINISHED (%s: %s)", outcome.name, reason)

    def _settle(self):
        if not is_partial_isomorphism(self._f, self._config.a, self._config.b):
            self._finish(Outcome.SPOILER_WINS, "f is not a partial isomorphism")
        elif len(self._f) >= self._config.k:
            self._finish(Outcome.DUPLICATOR_WINS, f"|dom f| reached k = {self._config.k}")

    def forfeit(self, actor: Actor, reason: str):
        if self.is_finished:
            raise PermissionError("ACCESS DENIED: match is over.")
        winner = Outcome.DUPLICATOR_WINS if actor is Actor.SPOILER else Outcome.SPOILER_WINS
        self._finish(winner, f"{actor.name.lower()} forfeits: {reason}")

    # ==========================================
    # EXTENSION MOVE
    # ==========================================
    def request_extension(self):
        self._require(Actor.SPOILER, GamePhase.MAIN, Pending.NONE, "an extension move")
        self._turns += 1
        self._pending = Pending.EXTENSION_REQUESTED

    def offer_bijection(self, g: PartialInjection):
        self._require(Actor.DUPLICATOR, GamePhase.MAIN, Pending.EXTENSION_REQUESTED, "a bijection")
        if not g.is_bijection_on(self._config.universe):
            raise IllegalMoveError(Actor.DUPLICATOR, "g is not a bijection on U")
        for x, y in self._f.items():
            if g.get(x) != y:
                raise IllegalMoveError(Actor.DUPLICATOR, f"g does not extend f at {x}")
        self._offer = g
        self._pending = Pending.BIJECTION_OFFERED

    def pick_element(self, a: str):
        self._require(Actor.SPOILER, GamePhase.MAIN, Pending.BIJECTION_OFFERED, "a pick")
        if a not in self._config.a.element_set:
            raise IllegalMoveError(Actor.SPOILER, f"{a!r} is not an element of U")
        if a in self._f:
            raise IllegalMoveError(Actor.SPOILER, f"{a} is already pebbled")
        self._f = compose_injection(self._f, PartialInjection({a: self._offer(a)}))
        self._offer = None
        self._pending = Pending.NONE
        logger.debug("[Game] Pebbled %s -> %s", a, self._f(a))
        self._settle()

    def apply_extension(self, g: PartialInjection, a: str):
        self.request_extension()
        self.offer_bijection(g)
        self.pick_element(a)

    # ==========================================
    # GRAPH MOVE
    # ==========================================
    def open_graph_move(self, move: GraphOpen):
        self._require(Actor.SPOILER, GamePhase.MAIN, Pending.NONE, "a graph move")
        cfg = self._config
        room = cfg.k - len(self._f)

        def illegal(reason: str):
            return IllegalMoveError(Actor.SPOILER, reason)

        if move.c < 1 or 2 * move.c > room:
            raise illegal(f"c = {move.c} exceeds (k - |β|)/2 = {room / 2}")
        if len(move.xs) != move.c or len(move.ys) != move.c or len(set(move.xs + move.ys)) != 2 * move.c:
            raise illegal("xs and ys must be 2c distinct variables")
        clash = {x.name for x in move.xs + move.ys} & set(cfg.a.constants)
        if clash:
            raise illegal(f"node variables clash with constants: {sorted(clash)}")
        budget = room - 2 * move.c
        for label, phi in (("φ_E", move.edge), ("φ_∼", move.sim)):
            if rank(phi) > budget:
                raise illegal(f"rank({label}) = {rank(phi)} exceeds k - |β| - 2c = {budget}")
            if iteration_degree(phi) > cfg.q:
                raise illegal(f"degree of {label} exceeds q = {cfg.q}")
            loose = free_variables(phi) - set(move.xs) - set(move.ys) - set(move.bindings)
            if loose:
                raise illegal(f"{label} has unbound variables {sorted(str(v) for v in loose)}")

        env_a, env_b = {}, {}
        for var, value in move.params:
            if not self._pebbled_or_number(value):
                raise illegal(f"parameter {var} must be pebbled or a number, got {value!r}")
            env_a[var] = value
            env_b[var] = self._f.get(value)
        if len(move.start) != move.c or not all(self._pebbled_or_number(v) for v in move.start):
            raise illegal("ā_0 must be a c-tuple over β ∪ N(U)")
        if not 0 <= move.level <= cfg.max_level:
            raise illegal(f"ℓ_0 = {move.level} outside 0..{cfg.max_level}")

        try:
            ga = build_semigraph(Evaluator(cfg.a, cfg.budget), move.xs, move.ys, move.edge, move.sim,
                                 env_a, mode=NodeMode.UNTYPED)
            gb = build_semigraph(Evaluator(cfg.b, cfg.budget), move.xs, move.ys, move.edge, move.sim,
                                 env_b, mode=NodeMode.UNTYPED)
        except BudgetExceededError as exc:
            raise illegal(f"semi-graph budget exceeded: {exc}") from exc

        self._turns += 1
        self._graph = GraphRound(move, self.beta, ga, gb, quotient(ga), quotient(gb),
                                 tuple(move.start), PartialInjection.empty(), move.level)
        self._phase = GamePhase.GRAPH_ROUND
        self._pending = Pending.ROUND_OPEN
        logger.debug("[Game] State -> GRAPH_ROUND (c=%d, |V|=%d, ℓ0=%d)", move.c, len(ga.vertices), move.level)
        if move.level == 0:
            self._end_graph_move()

    def _pebbled_or_number(self, value) -> bool:
        if isinstance(value, str):
            return value in self._f
        return value in self._config.a.number_domain

    def respond_graph(self, response: GraphResponse):
        self._require(Actor.DUPLICATOR, GamePhase.GRAPH_ROUND, Pending.ROUND_OPEN, "round maps")
        gr = self._graph
        qa, qb = gr.quotient_a, gr.quotient_b
        g = response.g
        if not g.is_bijection_on(self._config.universe):
            raise IllegalMoveError(Actor.DUPLICATOR, "g_i is not a bijection on U")
        f_i = compose_injection(self._f, gr.h)
        back = g.inverse().apply(f_i.apply(gr.node))
        if not qa.same_class(back, gr.node):
            raise IllegalMoveError(Actor.DUPLICATOR,
                                   f"g_i^-1(f_i(ā_i)) = {format_tuple(back)} is not ≅ {format_tuple(gr.node)}")

        failure = self._check_round(response)
        self._graph = replace(gr, response=response)
        self._pending = Pending.ROUND_ANSWERED
        if failure:
            self._finish(Outcome.SPOILER_WINS, failure)

    def _check_round(self, response: GraphResponse) -> str | None:
        """The three round conditions over all nodes; returns the first failure."""
        gr = self._graph
        qa, qb = gr.quotient_a, gr.quotient_b
        universe = self._config.a.element_set
        family = response.h_family
        checked: set = set()
        source = qa.class_of[gr.node]
        target = qb.class_of[response.g.apply(gr.node)]
        succ_a = set(qa.successors(source))
        succ_b = set(qb.successors(target))

        seen: dict = {}
        for v in gr.nodes:
            y = tuple_elements(v)
            h_y = family.get(y)
            if y not in checked:
                if h_y is None:
                    raise IllegalMoveError(Actor.DUPLICATOR, f"no map h_Y for Y = {sorted(y)}")
                if h_y.domain != y or not h_y.image <= universe:
                    raise IllegalMoveError(Actor.DUPLICATOR, f"h_Y for Y = {sorted(y)} is not an injection Y -> U")
                checked.add(y)
            w = h_y.apply(v)
            if w in seen:
                return f"condition (c) fails: {format_tuple(seen[w])} and {format_tuple(v)} both map to {format_tuple(w)}"
            seen[w] = v
            cv, cw = qa.class_of[v], qb.class_of[w]
            if (cv in succ_a) != (cw in succ_b):
                return f"condition (a) fails at {format_tuple(v)}"
            if qa.in_degree(cv) != qb.in_degree(cw):
                return f"condition (b) fails at {format_tuple(v)}: in-degree {qa.in_degree(cv)} vs {qb.in_degree(cw)}"
        return None

    def step_graph(self, node: tuple):
        self._require(Actor.SPOILER, GamePhase.GRAPH_ROUND, Pending.ROUND_ANSWERED, "a graph step")
        gr = self._graph
        qa = gr.quotient_a
        node = tuple(node)
        if node not in qa.class_of:
            raise IllegalMoveError(Actor.SPOILER, f"{node!r} is not a node of the semi-graph")
        target = qa.class_of[node]
        if target not in qa.successors(qa.class_of[gr.node]):
            raise IllegalMoveError(Actor.SPOILER, f"{format_tuple(node)} is not an [E_A]-successor of ā_i")

        level = (gr.level - 1) // qa.in_degree(target)
        h = gr.response.h_family[tuple_elements(node)]
        self._graph = replace(gr, node=node, h=h, level=level, index=gr.index + 1, response=None)
        self._pending = Pending.ROUND_OPEN
        try:
            compose_injection(self._f, h)
        except InjectionError as exc:
            self._finish(Outcome.SPOILER_WINS, f"h_{{i+1}} is incompatible with f: {exc}")
            return
        logger.debug("[Game] Round %d: ā=%s, ℓ=%d", gr.index + 1, format_tuple(node), level)
        if level == 0:
            self._end_graph_move()

    def apply_graph_round(self, g: PartialInjection, h_family, next_node: tuple):
        self.respond_graph(GraphResponse(g, h_family))
        if not self.is_finished:
            self.step_graph(next_node)

    def exit_graph_move(self):
        if self._pending is Pending.ROUND_ANSWERED:
            self._require(Actor.SPOILER, GamePhase.GRAPH_ROUND, Pending.ROUND_ANSWERED, "ending the graph move")
        else:
            self._require(Actor.SPOILER, GamePhase.GRAPH_ROUND, Pending.ROUND_OPEN, "ending the graph move")
        self._end_graph_move()

    def _end_graph_move(self):
        h = self._graph.h
        self._graph = None
        self._phase = GamePhase.MAIN
        self._pending = Pending.NONE
        try:
            self._f = compose_injection(self._f, h)
        except InjectionError as exc:
            self._finish(Outcome.SPOILER_WINS, f"f ∪ h_i is not an injection: {exc}")
            return
        logger.debug("[Game] State -> MAIN (|dom f| = %d)", len(self._f))
        self._settle()

    # ==========================================
    # DISPATCH (transcripts and the interactive REPL)
    # ==========================================
    def apply(self, actor: Actor, move: Move):
        match move:
            case Forfeit(reason):
                self.forfeit(actor, reason)
            case ExtensionRequest():
                self._as(actor, Actor.SPOILER, move)
                self.request_extension()
            case Bijection(g):
                self._as(actor, Actor.DUPLICATOR, move)
                self.offer_bijection(g)
            case Pick(element):
                self._as(actor, Actor.SPOILER, move)
                self.pick_element(element)
            case GraphOpen():
                self._as(actor, Actor.SPOILER, move)
                self.open_graph_move(move)
            case GraphResponse():
                self._as(actor, Actor.DUPLICATOR, move)
                self.respond_graph(move)
            case GraphStep(node):
                self._as(actor, Actor.SPOILER, move)
                self.step_graph(node)
            case GraphExit():
                self._as(actor, Actor.SPOILER, move)
                self.exit_graph_move()
            case _:
                raise IllegalMoveError(actor, f"unknown move {move!r}")

    @staticmethod
    def _as(actor: Actor, expected: Actor, move: Move):
        if actor is not expected:
            raise IllegalMoveError(actor, f"{move.kind} belongs to {expected.name.lower()}")

    # ==========================================
    # SNAPSHOTS
    # ==========================================
    def snapshot(self) -> dict:
        graph = None
        if self._graph is not None:
            gr = self._graph
            graph = {
                "c": gr.c,
                "beta": list(gr.beta),
                "node": list(gr.node),
                "h": gr.h.to_json(),
                "level": gr.level,
                "round": gr.index,
                "g": gr.response.g.to_json() if gr.response else None,
            }
        return {
            "f": self._f.to_json(),
            "phase": self._phase.name,
            "pending": self._pending.name,
            "outcome": self._outcome.name,
            "reason": self._reason,
            "turns": self._turns,
            "offer": self._offer.to_json() if self._offer else None,
            "graph": graph,
        }

    def state_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.snapshot()).encode("utf-8")).hexdigest()

    # ==========================================
    # THE KILL SWITCH
    # ==========================================
    def reset_session(self):
        logger.debug("[Game] Reset: back to the initial position")
        self._start()


def start(cfg: GameConfig, f0: PartialInjection | None = None) -> GameSession:
    return GameSession.start(cfg, f0)


__all__ = ["GameSession", "GraphRound", "start"]
