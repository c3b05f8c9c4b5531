"""
Agent protocols and the two reference Duplicators.

An agent only ever reads the session; run_match submits what it returns.
"""
from typing import Protocol, runtime_checkable

import numpy as np

from Backend.session_engine import GameSession
from engine.core.injections import PartialInjection, compose_injection
from engine.core.structures import tuple_elements
from engine.game.moves import ExtensionRequest, GameConfig, GraphOpen, GraphResponse


@runtime_checkable
class SpoilerAgent(Protocol):
    name: str

    def begin(self, config: GameConfig, rng: np.random.Generator) -> None: ...

    def choose_move(self, session: GameSession) -> ExtensionRequest | GraphOpen: ...

    def pick(self, session: GameSession, g: PartialInjection) -> str: ...

    def graph_step(self, session: GameSession) -> tuple | None:
        """The next node ā_{i+1}, or None to end the graph move."""
        ...


@runtime_checkable
class DuplicatorAgent(Protocol):
    name: str

    def begin(self, config: GameConfig, rng: np.random.Generator) -> None: ...

    def extension_response(self, session: GameSession) -> PartialInjection: ...

    def graph_response(self, session: GameSession) -> GraphResponse: ...


# ============================================================
# Helpers shared by the Duplicators
# ============================================================

def complete_bijection(partial: PartialInjection, universe, rng: np.random.Generator | None = None) -> PartialInjection:
    """
    Extend `partial` to a bijection on `universe`. Without a generator the
    completion is canonical: free fixed points first, then the remaining
    elements paired in sorted order.
    """
    universe = sorted(universe)
    pairs = dict(partial.pairs)
    sources = [x for x in universe if x not in pairs]
    used = partial.image
    targets = [y for y in universe if y not in used]
    if rng is not None:
        targets = [targets[i] for i in rng.permutation(len(targets))]
        pairs.update(zip(sources, targets))
        return PartialInjection(pairs)

    free = set(targets)
    rest_sources = []
    for x in sources:
        if x in free:
            pairs[x] = x
            free.discard(x)
        else:
            rest_sources.append(x)
    pairs.update(zip(rest_sources, sorted(free)))
    return PartialInjection(pairs)


def round_position(session: GameSession) -> PartialInjection:
    """f_i = f ∪ h_i for the running graph round."""
    return compose_injection(session.f, session.graph.h)


def restriction_family(session: GameSession, g: PartialInjection) -> dict:
    """h_Y = g|Y for every Y = U(v̄) of the round's node set."""
    family = {}
    for v in session.graph.nodes:
        y = tuple_elements(v)
        if y not in family:
            family[y] = g.restrict(y)
    return family


# ============================================================
# Reference Duplicators
# ============================================================

class IdentityDuplicator:
    """Canonical completion of the position. Never loses on identical structures."""
    name = "identity"

    def begin(self, config: GameConfig, rng: np.random.Generator) -> None:
        self._universe = config.universe

    def extension_response(self, session: GameSession) -> PartialInjection:
        return complete_bijection(session.f, self._universe)

    def graph_response(self, session: GameSession) -> GraphResponse:
        g = complete_bijection(round_position(session), self._universe)
        return GraphResponse(g, restriction_family(session, g))


class RandomDuplicator:
    name = "random"

    def begin(self, config: GameConfig, rng: np.random.Generator) -> None:
        self._universe = config.universe
        self._rng = rng

    def extension_response(self, session: GameSession) -> PartialInjection:
        return complete_bijection(session.f, self._universe, self._rng)

    def graph_response(self, session: GameSession) -> GraphResponse:
        g = complete_bijection(round_position(session), self._universe, self._rng)
        return GraphResponse(g, restriction_family(session, g))
