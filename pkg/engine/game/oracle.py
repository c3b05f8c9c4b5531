"""
Exhaustive decision of the classic r-round bijection game, used as an
independent check of the extension-move machinery on tiny structures.
"""
from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from engine.core.injections import PartialInjection, is_partial_isomorphism
from engine.core.structures import Structure
from engine.errors import ConfigError, OracleLimitError

# ============================================================
# Configuration
# ============================================================

ORACLE_MAX_UNIVERSE = 6
ORACLE_MAX_ROUNDS = 3


def bijection_game_oracle(a: Structure, b: Structure, r: int) -> bool:
    """
    True iff Duplicator wins the r-round bijection game on (a, b), starting
    from the position that pebbles every constant.

    Duplicator survives a round at f iff there is a bijection extending f
    under which every pick leads to a winning position; with f fixed this is
    a perfect matching between unpebbled elements of a and unused elements
    of b, decided with scipy's maximum_bipartite_matching.

    Raises:
        OracleLimitError: |U| > ORACLE_MAX_UNIVERSE or r > ORACLE_MAX_ROUNDS
    """
    if a.size > ORACLE_MAX_UNIVERSE:
        raise OracleLimitError(f"|U| = {a.size} exceeds {ORACLE_MAX_UNIVERSE}")
    if not 0 <= r <= ORACLE_MAX_ROUNDS:
        raise OracleLimitError(f"r = {r} outside 0..{ORACLE_MAX_ROUNDS}")
    if a.universe != b.universe:
        raise ConfigError("the two structures must share one universe")

    start = {}
    for name in sorted(a.constants):
        ea, eb = a.constants[name], b.constants[name]
        if start.get(ea, eb) != eb or eb in {v for x, v in start.items() if x != ea}:
            return False
        start[ea] = eb

    universe = a.universe

    @lru_cache(maxsize=None)
    def wins(position: frozenset, rounds: int) -> bool:
        f = PartialInjection(dict(position))
        if not is_partial_isomorphism(f, a, b):
            return False
        if rounds == 0:
            return True
        # A pick of a pebbled element leaves f unchanged.
        if f.domain and not wins(position, rounds - 1):
            return False
        rows = [x for x in universe if x not in f]
        cols = [y for y in universe if y not in f.image]
        if not rows:
            return True
        edges = np.zeros((len(rows), len(cols)), dtype=np.int8)
        for i, x in enumerate(rows):
            for j, y in enumerate(cols):
                if wins(position | {(x, y)}, rounds - 1):
                    edges[i, j] = 1
        matching = maximum_bipartite_matching(csr_matrix(edges), perm_type="column")
        return bool(np.all(matching >= 0))

    return wins(frozenset(start.items()), r)
