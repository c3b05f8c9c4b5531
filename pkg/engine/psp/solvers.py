"""
Two independent deciders for the path-systems problem.
"""
import logging
from collections import deque

from engine.eval.budget import Budget
from engine.eval.evaluator import eval_formula
from engine.logic.formulas import Vocabulary
from engine.logic.parser import parse_formula
from engine.psp.instances import LFP_SENTENCE, PspInstance

logger = logging.getLogger("lrec.psp")


def upward_closure(inst: PspInstance) -> frozenset:
    """Smallest Y ⊇ S with a, b ∈ Y and R(a, b, c) implying c ∈ Y (worklist)."""
    s = inst.structure
    by_first: dict = {}
    by_second: dict = {}
    for a, b, c in s.relation("R").tuples:
        by_first.setdefault(a, []).append((b, c))
        by_second.setdefault(b, []).append((a, c))

    closed = set()
    queue = deque(sorted(e for (e,) in s.relation("S").tuples))
    while queue:
        x = queue.popleft()
        if x in closed:
            continue
        closed.add(x)
        for b, c in by_first.get(x, ()):
            if b in closed and c not in closed:
                queue.append(c)
        for a, c in by_second.get(x, ()):
            if a in closed and c not in closed:
                queue.append(c)
    return frozenset(closed)


def solve_direct(inst: PspInstance) -> bool:
    return inst.structure.constants["t"] in upward_closure(inst)


def solve_via_lfp(inst: PspInstance, budget: Budget | None = None) -> bool:
    phi = parse_formula(LFP_SENTENCE, Vocabulary.from_structure(inst.structure))
    result = eval_formula(phi, inst.structure, {}, budget)
    logger.debug("[PSP] lfp sentence evaluates to %s", result)
    return result
