"""
The offset Duplicator for P(h, p, σ, t) against P(h, p, σ, t + δ).

Positions are kept of the form bij(ρ) for a consistent offset function ρ
on the pebbled tree nodes. Extension moves answer with the closure of ρ and
zero everywhere else. Graph rounds zero the offsets of frontier nodes that
are free in the class of the current node, and lift the result onto every
node the round conditions consult, once per round.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from Backend.session_engine import GameSession
from engine.core.injections import PartialInjection
from engine.core.structures import tuple_elements
from engine.errors import InconsistentOffsetError, TreeError
from engine.eval.semigraphs import QuotientGraph
from engine.game.agents import complete_bijection, restriction_family, round_position
from engine.game.moves import GameConfig, GraphResponse
from engine.psp.instances import TreeGroupSpec
from engine.strategy.offsets import (
    null_height, offset_bijection, rho_from_injection, shift_tuple, spike_closure, total_offset_bijection,
    tuple_nodes,
)
from engine.treecomb.closures import closure, frontier
from engine.treecomb.consistency import OffsetFn, extend_consistent
from engine.treecomb.lifts import lift_sequence
from engine.treecomb.trees import BinTree

logger = logging.getLogger("lrec.strategy")


@dataclass
class DupStrategyState:
    """What the Duplicator last derived; kept for diagnostics and tests."""
    spec: TreeGroupSpec
    rho: OffsetFn | None = None
    sigma: OffsetFn | None = None
    frontier: frozenset = frozenset()
    free: frozenset = frozenset()
    bounded: frozenset = frozenset()
    fallbacks: int = 0
    rounds: list = field(default_factory=list)


def duplicator_extension_response(t: BinTree, f: PartialInjection, p: int) -> PartialInjection:
    """
    bij(σ) where σ extends cl(ρ) by zero on every node outside cl(β).

    Raises:
        InconsistentOffsetError: f is not of the form bij(ρ) for a consistent ρ
    """
    rho = rho_from_injection(f, p)
    if rho is None:
        raise InconsistentOffsetError("the position is not an offset bijection")
    return total_offset_bijection(t, extend_consistent(t, rho))


def is_free_in_class(t: BinTree, qa: QuotientGraph, node: tuple, u: int, beta_nodes: frozenset, p: int,
                     value: int = 1) -> bool:
    """
    u is free in [ā] when shifting ā by the closure of the spike at u (over
    β ∪ M, M the frontier of cl(V(ã))) stays inside the class of ā. One spike
    value decides it, since the spikes at u generate each other by powers.
    """
    nodes = tuple_nodes(node)
    m = frontier(t, closure(t, nodes))
    if u not in m or u in beta_nodes:
        return False
    lifted = spike_closure(t, p, beta_nodes | m, u, value)
    if lifted is None:
        return False
    image = shift_tuple(lifted.restrict(nodes), node)
    return image in qa.class_of and qa.same_class(image, node)


def duplicator_graph_response(t: BinTree, p: int, session: GameSession,
                              state: DupStrategyState | None = None) -> GraphResponse:
    """
    (g_i, {h_Y}) for the running round.

    σ_i = cl(ρ_i) on cl(β ∪ M_i), minus the spike closures that cancel ρ_i on
    every free frontier node; g_i = bij(σ_i) extended by zero; h_Y = bij(η)|Y
    with η one lift of σ_i onto the nodes of every Y of the round, so the h_Y
    agree wherever they overlap. When the spikes would move
    g_i^{-1}(f_i(ā_i)) out of its class, σ_i falls back to cl(ρ_i).

    Raises:
        InconsistentOffsetError: f_i is not of the form bij(ρ) for a consistent ρ
    """
    gr = session.graph
    qa = gr.quotient_a
    f_i = round_position(session)
    rho_i = rho_from_injection(f_i, p)
    if rho_i is None:
        raise InconsistentOffsetError("the round position is not an offset bijection")
    rho_hat = extend_consistent(t, rho_i)

    beta_nodes = tuple_nodes(session.beta)
    node_set = tuple_nodes(gr.node)
    m = frontier(t, closure(t, node_set)) if node_set else frozenset()
    region = closure(t, beta_nodes | m)
    base = rho_hat.restrict(region)

    free = frozenset(u for u in m - beta_nodes if is_free_in_class(t, qa, gr.node, u, beta_nodes, p))
    values = dict(base.values)
    for u in sorted(free):
        cancel = spike_closure(t, p, beta_nodes | m, u, -rho_hat[u])
        for v, a in cancel.items():
            values[v] = (values[v] + a) % p
    sigma = OffsetFn(p, values)

    g = total_offset_bijection(t, sigma)
    target = f_i.apply(gr.node)
    fallback = not qa.same_class(g.inverse().apply(target), gr.node)
    if fallback:
        logger.debug("[Duplicator] Round %d: spikes leave the class of ā, keeping cl(ρ)", gr.index)
        sigma = base
        g = total_offset_bijection(t, sigma)

    ys = {tuple_elements(v) for v in gr.nodes}
    lifted_nodes = frozenset().union(*(tuple_nodes(tuple(y)) for y in ys))
    eta = lift_sequence(t, sigma.domain, sigma, [lifted_nodes])[0] if lifted_nodes else OffsetFn(p)
    shift = offset_bijection(eta, lifted_nodes)
    family = {y: PartialInjection({x: shift.pairs[x] for x in y}) for y in ys}

    if state is not None:
        state.rho = rho_i
        state.sigma = sigma
        state.frontier = m
        state.free = free
        state.bounded = m - beta_nodes - free
        state.fallbacks += int(fallback)
        state.rounds.append({
            "round": gr.index,
            "null_height": null_height(t, rho_i),
            "free": len(free),
            "bounded": len(state.bounded),
            "fallback": fallback,
        })
    return GraphResponse(g, family)


class OffsetDuplicator:
    """
    The offset strategy as an agent. Positions it cannot read as an offset
    bijection (only reachable from a hand-made f0) get the canonical
    completion instead, with a warning.
    """
    name = "paper"

    def __init__(self, spec: TreeGroupSpec):
        self.spec = spec
        self.tree = BinTree(spec.h)
        self.state = DupStrategyState(spec)

    def begin(self, config: GameConfig, rng: np.random.Generator) -> None:
        self._universe = config.universe
        self.state = DupStrategyState(self.spec)

    def extension_response(self, session: GameSession) -> PartialInjection:
        try:
            g = duplicator_extension_response(self.tree, session.f, self.spec.p)
        except InconsistentOffsetError as exc:
            logger.warning("[Duplicator] %s; answering with the canonical completion", exc)
            self.state.fallbacks += 1
            return complete_bijection(session.f, self._universe)
        self.state.rho = rho_from_injection(session.f, self.spec.p)
        return g

    def graph_response(self, session: GameSession) -> GraphResponse:
        try:
            return duplicator_graph_response(self.tree, self.spec.p, session, self.state)
        except (InconsistentOffsetError, TreeError) as exc:
            logger.warning("[Duplicator] %s; answering with the canonical completion", exc)
            self.state.fallbacks += 1
            g = complete_bijection(round_position(session), self._universe)
            return GraphResponse(g, restriction_family(session, g))

    @property
    def min_null_height(self) -> float:
        heights = [r["null_height"] for r in self.state.rounds]
        return min(heights, default=math.inf)


__all__ = [
    "DupStrategyState", "OffsetDuplicator", "duplicator_extension_response", "duplicator_graph_response",
    "is_free_in_class",
]
