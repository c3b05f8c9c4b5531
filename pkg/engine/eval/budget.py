"""
Evaluation budgets and semi-graph node domains.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum, auto
from itertools import product

from engine.core.structures import Structure
from engine.errors import BudgetExceededError
from engine.logic.formulas import Sort

logger = logging.getLogger("lrec.eval")

# ============================================================
# Configuration
# ============================================================

DEFAULT_MAX_NODES = 20_000
DEFAULT_MAX_PAIRS = 1_000_000


@dataclass(frozen=True)
class Budget:
    max_nodes: int = DEFAULT_MAX_NODES
    max_pairs: int = DEFAULT_MAX_PAIRS

    def check_nodes(self, count: int) -> None:
        if count > self.max_nodes:
            logger.warning("[Budget] refusing %d nodes (limit %d)", count, self.max_nodes)
            raise BudgetExceededError(f"semi-graph needs {count} nodes, budget is {self.max_nodes}")

    def check_pairs(self, count: int) -> None:
        if count > self.max_pairs:
            logger.warning("[Budget] refusing after %d pair evaluations (limit %d)", count, self.max_pairs)
            raise BudgetExceededError(f"more than {self.max_pairs} pair evaluations")


class NodeMode(Enum):
    """
    TYPED:   product of per-position domains fixed by the variable sorts (lrec semantics).
    UNTYPED: (A ∪ N(A))^c regardless of sorts (game graph moves).
    """
    TYPED = auto()
    UNTYPED = auto()


def sort_domain(s: Structure, sort: Sort) -> tuple:
    if sort is Sort.ELEMENT:
        return s.universe
    return tuple(s.number_domain.values())


def node_domain(s: Structure, sorts, mode: NodeMode, budget: Budget | None = None) -> list:
    """All node tuples for the given position sorts, in canonical order."""
    sorts = list(sorts)
    if mode is NodeMode.TYPED:
        factors = [sort_domain(s, sort) for sort in sorts]
    else:
        factors = [s.domain_values()] * len(sorts)
    if budget is not None:
        budget.check_nodes(math.prod(len(f) for f in factors))
    return list(product(*factors))
