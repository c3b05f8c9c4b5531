"""
Formula Evaluation
==================
Tarskian semantics for FO / FOC, least fixed points by stage iteration, and
lrec by building the interpreted labelled semi-graph and asking χ̂.

Quantifier, count and semi-graph loops use guarded enumeration: positive
relation atoms, equalities and count comparisons in a body yield a superset
of the values that can satisfy it (looked up in per-relation indexes), and
only those values are evaluated.
"""
import logging
from itertools import product
from typing import Mapping

from engine.core.structures import Structure, encode_number_tuple, is_element, is_number
from engine.errors import BudgetExceededError, SortError, StructureError, UnboundVariableError
from engine.eval.budget import Budget, NodeMode, node_domain, sort_domain
from engine.eval.semigraphs import LabelledSemiGraph, QuotientGraph, quotient
from engine.logic.formulas import (
    And, Atom, Const, Count, Eq, Exists, Forall, Formula, Lfp, Lrec, Not, NumLit, Or, Sort, Truth, Var,
)
from engine.logic.measures import free_variables

logger = logging.getLogger("lrec.eval")

FALSE = Truth(False)


def value_matches_sort(value, sort: Sort) -> bool:
    return is_element(value) if sort is Sort.ELEMENT else is_number(value)


class Evaluator:
    """Evaluation context for one structure; caches indexes, fixpoints and lrec quotients."""

    def __init__(self, structure: Structure, budget: Budget | None = None):
        self.structure = structure
        self.budget = budget or Budget()
        self.n = structure.size
        self._indexes: dict = {}
        self._fixpoints: dict = {}
        self._quotients: dict = {}

    # ==========================================
    # PUBLIC
    # ==========================================
    def holds(self, phi: Formula, env: Mapping | None = None) -> bool:
        return self._eval(phi, dict(env or {}), {})

    def check_env(self, phi: Formula, env: Mapping) -> None:
        for var in sorted(free_variables(phi), key=lambda v: (v.name, v.sort.name)):
            if var not in env:
                raise UnboundVariableError(f"unbound variable {var}")
        for var, value in env.items():
            if not value_matches_sort(value, var.sort):
                raise SortError(f"variable {var} bound to {value!r} of the wrong sort")
            if not self.structure.contains_value(value):
                raise SortError(f"variable {var} bound to {value!r} outside A ∪ N(A)")

    def domain(self, var: Var) -> tuple:
        return sort_domain(self.structure, var.sort)

    def value(self, term, env: Mapping):
        match term:
            case Var():
                try:
                    return env[term]
                except KeyError:
                    raise UnboundVariableError(f"unbound variable {term}") from None
            case Const(name):
                try:
                    return self.structure.constants[name]
                except KeyError:
                    raise StructureError([f"unknown constant {name}"]) from None
            case NumLit(value):
                return value
        raise TypeError(f"not a term: {term!r}")

    # ==========================================
    # RECURSIVE SEMANTICS
    # ==========================================
    def _eval(self, phi: Formula, env: dict, rel: dict) -> bool:
        match phi:
            case Truth(value):
                return value
            case Atom(name, args):
                values = tuple(self.value(a, env) for a in args)
                if name in rel:
                    return values in rel[name]
                return values in self.structure.relation(name).tuples
            case Eq(left, right):
                return self.value(left, env) == self.value(right, env)
            case Not(body):
                return not self._eval(body, env, rel)
            case And(left, right):
                return self._eval(left, env, rel) and self._eval(right, env, rel)
            case Or(left, right):
                return self._eval(left, env, rel) or self._eval(right, env, rel)
            case Exists(var, body):
                return any(self._eval(body, {**env, var: v}, rel)
                           for v in self.candidates(body, var, env, rel))
            case Forall(var, body):
                return all(self._eval(body, {**env, var: v}, rel) for v in self.domain(var))
            case Count(var, body, number):
                count = sum(1 for v in self.candidates(body, var, env, rel)
                            if self._eval(body, {**env, var: v}, rel))
                return count == self.value(number, env)
            case Lfp():
                fixpoint = self._fixpoint(phi, env, rel)
                return tuple(self.value(a, env) for a in phi.args) in fixpoint
            case Lrec():
                return self._lrec(phi, env)
        raise TypeError(f"not a formula: {phi!r}")

    # ==========================================
    # GUARDED ENUMERATION
    # ==========================================
    def candidates(self, body: Formula, var: Var, env: Mapping, rel: Mapping | None = None) -> tuple:
        """Values of `var` worth evaluating `body` on, in canonical order."""
        found = self._candidates(body, var, env, rel or {})
        domain = self.domain(var)
        if found is None:
            return domain
        return tuple(sorted(v for v in found if value_matches_sort(v, var.sort) and self.structure.contains_value(v)))

    def _bound(self, term, var: Var, env: Mapping) -> bool:
        if isinstance(term, Var):
            return term != var and term in env
        return True

    def _candidates(self, phi: Formula, var: Var, env: Mapping, rel: Mapping):
        match phi:
            case Truth(False):
                return set()
            case Atom(name, args):
                if name in rel or var not in args:
                    return None
                positions = [i for i, a in enumerate(args) if a == var]
                bound = [i for i, a in enumerate(args) if a != var and self._bound(a, var, env)]
                key = tuple(self.value(args[i], env) for i in bound)
                rows = self._index(name, tuple(bound)).get(key, ())
                first = positions[0]
                return {row[first] for row in rows if all(row[p] == row[first] for p in positions)}
            case Eq(left, right):
                if left == var and right != var and self._bound(right, var, env):
                    return {self.value(right, env)}
                if right == var and left != var and self._bound(left, var, env):
                    return {self.value(left, env)}
                return None
            case And(left, right):
                a = self._candidates(left, var, env, rel)
                b = self._candidates(right, var, env, rel)
                if a is None:
                    return b
                if b is None:
                    return a
                return a & b
            case Or(left, right):
                a = self._candidates(left, var, env, rel)
                if a is None:
                    return None
                b = self._candidates(right, var, env, rel)
                if b is None:
                    return None
                return a | b
            case Exists(inner, body):
                if inner == var:
                    return None
                inner_env = {k: v for k, v in env.items() if k != inner}
                return self._candidates(body, var, inner_env, rel)
            case Count(inner, body, number):
                # [# inner body] = var pins var to the count
                if number != var or inner == var or var in free_variables(body):
                    return None
                if not free_variables(body) - {inner} <= set(env):
                    return None
                return {sum(1 for v in self.candidates(body, inner, env, rel)
                            if self._eval(body, {**env, inner: v}, dict(rel)))}
        return None

    def _index(self, name: str, positions: tuple) -> dict:
        key = (name, positions)
        index = self._indexes.get(key)
        if index is None:
            index = {}
            for row in sorted(self.structure.relation(name).tuples):
                index.setdefault(tuple(row[i] for i in positions), []).append(row)
            self._indexes[key] = index
        return index

    def enumerate_tuples(self, phi: Formula, ys: tuple, env: Mapping):
        """Candidate value tuples for the variables ys (later ys are wildcards)."""
        if not ys:
            yield ()
            return
        head, rest = ys[0], ys[1:]
        head_env = {k: v for k, v in env.items() if k not in ys}
        for value in self.candidates(phi, head, head_env):
            for tail in self.enumerate_tuples(phi, rest, {**head_env, head: value}):
                yield (value,) + tail

    # ==========================================
    # FIXED POINTS
    # ==========================================
    def _fixpoint(self, phi: Lfp, env: dict, rel: dict) -> frozenset:
        params = free_variables(phi.body) - set(phi.vars)
        key = None
        if not rel:
            key = (phi.relvar, phi.vars, phi.body,
                   tuple(sorted(((v.name, v.sort.name), env[v]) for v in params if v in env)))
            if key in self._fixpoints:
                return self._fixpoints[key]

        domains = [self.domain(x) for x in phi.vars]
        total = 1
        for d in domains:
            total *= len(d)
        self.budget.check_pairs(total)

        stage: frozenset = frozenset()
        while True:
            inner_rel = {**rel, phi.relvar: stage}
            following = frozenset(
                values for values in product(*domains)
                if self._eval(phi.body, {**env, **dict(zip(phi.vars, values))}, inner_rel))
            if following == stage:
                break
            stage = following
        if key is not None:
            self._fixpoints[key] = stage
        return stage

    # ==========================================
    # LREC
    # ==========================================
    def lrec_quotient(self, phi: Lrec, env: Mapping) -> QuotientGraph:
        params = (free_variables(phi.edge) | free_variables(phi.sim) | free_variables(phi.label)) \
            - set(phi.us) - set(phi.vs) - set(phi.ps)
        key = (phi.us, phi.vs, phi.ps, phi.edge, phi.sim, phi.label,
               tuple(sorted(((v.name, v.sort.name), env[v]) for v in params)))
        cached = self._quotients.get(key)
        if cached is None:
            graph = build_semigraph(self, phi.us, phi.vs, phi.edge, phi.sim, env,
                                    mode=NodeMode.TYPED, label=(phi.ps, phi.label))
            cached = quotient(graph)
            self._quotients[key] = cached
        return cached

    def _lrec(self, phi: Lrec, env: dict) -> bool:
        q = self.lrec_quotient(phi, env)
        node = tuple(self.value(w, env) for w in phi.ws)
        counter = encode_number_tuple(tuple(self.value(r, env) for r in phi.rs), self.n)
        if node not in q.class_of:
            return False
        return q.holds(node, counter)


def build_semigraph(evaluator: Evaluator, xs: tuple, ys: tuple, edge: Formula, sim: Formula,
                    env: Mapping, mode: NodeMode = NodeMode.TYPED,
                    label: tuple | None = None) -> LabelledSemiGraph:
    """
    Materialize (V, E, ∼, C) for the node variables xs / ys under `env`.

    V comes from node_domain (typed or untyped). A node whose entries do not
    match the sorts of xs makes every body false, so it stays isolated with
    an empty label. `label` is (ps, φ_C) with C(ā) = {⟨p̄⟩ : φ_C[ā, p̄]}.

    Raises:
        BudgetExceededError: node or pair budget exceeded
    """
    s = evaluator.structure
    budget = evaluator.budget
    sorts = [x.sort for x in xs]
    nodes = node_domain(s, sorts, mode, budget)
    counter = [0]

    def compatible(node) -> bool:
        return all(value_matches_sort(v, sort) for v, sort in zip(node, sorts))

    def pairs(phi: Formula) -> frozenset:
        if phi == FALSE:
            return frozenset()
        found = set()
        for a in nodes:
            if not compatible(a):
                continue
            base = {**env, **dict(zip(xs, a))}
            for b in evaluator.enumerate_tuples(phi, ys, base):
                counter[0] += 1
                budget.check_pairs(counter[0])
                if evaluator.holds(phi, {**base, **dict(zip(ys, b))}):
                    found.add((a, b))
        return frozenset(found)

    edges = pairs(edge)
    sims = pairs(sim)

    labels = {}
    if label is not None:
        ps, phi_c = label
        for a in nodes:
            if not compatible(a):
                continue
            base = {**env, **dict(zip(xs, a))}
            codes = set()
            for p in evaluator.enumerate_tuples(phi_c, ps, base):
                counter[0] += 1
                budget.check_pairs(counter[0])
                if evaluator.holds(phi_c, {**base, **dict(zip(ps, p))}):
                    codes.add(encode_number_tuple(p, evaluator.n))
            if codes:
                labels[a] = frozenset(codes)

    logger.debug("[Eval] semi-graph with %d nodes, %d edges, %d sim pairs", len(nodes), len(edges), len(sims))
    return LabelledSemiGraph(tuple(nodes), edges, sims, labels)


def eval_formula(phi: Formula, s: Structure, env: Mapping | None = None,
                 budget: Budget | None = None) -> bool:
    """
    Evaluate phi on s under env.

    Raises:
        UnboundVariableError: a free variable of phi has no value
        SortError: a binding has the wrong sort or lies outside A ∪ N(A)
        BudgetExceededError: an lrec semi-graph or lfp stage is too large
    """
    env = dict(env or {})
    evaluator = Evaluator(s, budget)
    evaluator.check_env(phi, env)
    return evaluator.holds(phi, env)


def eval_lrec(node: Lrec, s: Structure, env: Mapping | None = None, budget: Budget | None = None) -> bool:
    if not isinstance(node, Lrec):
        raise TypeError("eval_lrec expects an lrec node")
    return eval_formula(node, s, env, budget)
