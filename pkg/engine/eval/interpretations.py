"""
Interpretations
===============
A d-dimensional interpretation defines a new structure whose elements are
d-tuples of A ∪ N(A) (or of the typed per-position domains). δ restricts
the tuples, ε (optional) quotients them by a congruence, and one formula per
relation symbol defines the relations. The semi-graph variant instead yields
(V, E, ∼, C) for the lrec operator and the game's graph move.
"""
import logging
from dataclasses import dataclass, field
from typing import Mapping

from engine.core.structures import Relation, Structure, format_tuple
from engine.errors import InterpretationError
from engine.eval.budget import Budget, NodeMode, node_domain
from engine.eval.evaluator import Evaluator, build_semigraph, value_matches_sort
from engine.eval.semigraphs import LabelledSemiGraph
from engine.logic.formulas import Formula

logger = logging.getLogger("lrec.eval")


@dataclass(frozen=True)
class Interpretation:
    """
    relations maps a target symbol to (variables, formula); the variables come
    in arity blocks of `dimension` each. epsilon, when given, is over 2·d
    variables: the first block names the left tuple, the second the right.
    """
    dimension: int
    xs: tuple
    params: tuple = ()
    delta: Formula | None = None
    epsilon: tuple | None = None
    relations: Mapping[str, tuple] = field(default_factory=dict)
    mode: NodeMode = NodeMode.TYPED

    __hash__ = None

    def __post_init__(self):
        if len(self.xs) != self.dimension:
            raise InterpretationError(f"expected {self.dimension} universe variables, got {len(self.xs)}")
        if self.epsilon is not None and len(self.epsilon[0]) != 2 * self.dimension:
            raise InterpretationError("epsilon needs two blocks of universe variables")
        for name, (variables, _) in self.relations.items():
            if len(variables) % self.dimension:
                raise InterpretationError(f"variables of {name} do not split into blocks of {self.dimension}")


@dataclass(frozen=True)
class SemiGraphInterpretation:
    """(φ_E, φ_∼) over (xs, ys) and the optional label formula φ_C over (xs, ps)."""
    xs: tuple
    ys: tuple
    edge: Formula
    sim: Formula
    ps: tuple = ()
    label: Formula | None = None
    params: tuple = ()
    mode: NodeMode = NodeMode.TYPED

    @property
    def dimension(self) -> int:
        return len(self.xs)


def _blocks(values: tuple, d: int) -> tuple:
    return tuple(values[i:i + d] for i in range(0, len(values), d))


def _check_params(i, params: Mapping) -> dict:
    env = dict(params)
    missing = [str(v) for v in i.params if v not in env]
    if missing:
        raise InterpretationError(f"missing parameter values: {missing}")
    return env


def apply_interpretation(i: Interpretation | SemiGraphInterpretation, s: Structure,
                         params: Mapping | None = None,
                         budget: Budget | None = None) -> Structure | LabelledSemiGraph:
    """
    Raises:
        InterpretationError: missing parameters, or ε is not a congruence
        BudgetExceededError: the node or pair budget is exceeded
    """
    env = _check_params(i, params or {})
    evaluator = Evaluator(s, budget)
    match i:
        case SemiGraphInterpretation():
            label = (i.ps, i.label) if i.label is not None else None
            return build_semigraph(evaluator, i.xs, i.ys, i.edge, i.sim, env, mode=i.mode, label=label)
        case Interpretation():
            return _apply_structure(i, evaluator, env)
    raise TypeError(f"not an interpretation: {i!r}")


def _apply_structure(i: Interpretation, evaluator: Evaluator, env: dict) -> Structure:
    s = evaluator.structure
    sorts = [x.sort for x in i.xs]
    nodes = []
    for node in node_domain(s, sorts, i.mode, evaluator.budget):
        if not all(value_matches_sort(v, x.sort) for v, x in zip(node, i.xs)):
            continue
        if i.delta is None or evaluator.holds(i.delta, {**env, **dict(zip(i.xs, node))}):
            nodes.append(node)
    if not nodes:
        raise InterpretationError("δ defines an empty universe")

    representative = {node: node for node in nodes}
    if i.epsilon is not None:
        representative = _classes(i, evaluator, env, nodes)

    def name(node) -> str:
        return format_tuple(representative[node])

    relations = {}
    for symbol, (variables, phi) in sorted(i.relations.items()):
        arity = len(variables) // i.dimension
        blocks = _blocks(tuple(variables), i.dimension)
        tuples = set()
        for combo in _product(nodes, arity):
            binding = {**env}
            for block, node in zip(blocks, combo):
                binding.update(zip(block, node))
            if evaluator.holds(phi, binding):
                tuples.add(combo)
        if i.epsilon is not None:
            _check_invariant(symbol, tuples, representative)
        relations[symbol] = Relation(arity, frozenset(tuple(name(n) for n in t) for t in tuples))

    universe = sorted({name(node) for node in nodes})
    logger.debug("[Interpretation] %d-dimensional image with %d elements", i.dimension, len(universe))
    return Structure.build(universe, relations)


def _product(nodes: list, arity: int):
    if arity == 0:
        yield ()
        return
    for head in nodes:
        for tail in _product(nodes, arity - 1):
            yield (head,) + tail


def _classes(i: Interpretation, evaluator: Evaluator, env: dict, nodes: list) -> dict:
    variables, phi = i.epsilon
    left, right = variables[:i.dimension], variables[i.dimension:]

    def related(a, b) -> bool:
        return evaluator.holds(phi, {**env, **dict(zip(left, a)), **dict(zip(right, b))})

    representative = {}
    for node in nodes:
        if not related(node, node):
            raise InterpretationError(f"ε is not reflexive at {format_tuple(node)}")
        for rep in dict.fromkeys(representative.values()):
            if related(node, rep):
                if not related(rep, node):
                    raise InterpretationError("ε is not symmetric")
                representative[node] = rep
                break
        else:
            representative[node] = node

    for a in nodes:
        for b in nodes:
            same = representative[a] == representative[b]
            if related(a, b) != same:
                raise InterpretationError(
                    f"ε is not an equivalence: {format_tuple(a)} and {format_tuple(b)}")
    return representative


def _check_invariant(symbol: str, tuples: set, representative: dict) -> None:
    """Each tuple of classes lies entirely inside or entirely outside the relation."""
    size: dict = {}
    for rep in representative.values():
        size[rep] = size.get(rep, 0) + 1
    by_class: dict = {}
    for t in tuples:
        key = tuple(representative[n] for n in t)
        by_class[key] = by_class.get(key, 0) + 1
    for key, count in by_class.items():
        expected = 1
        for rep in key:
            expected *= size[rep]
        if count != expected:
            raise InterpretationError(f"ε is not a congruence for {symbol}")
