"""
Free Elements and Lift Sequences
================================
A node y of cl(Y) is free over ρ (with dom ρ = X) unless some closed
connected S ⊆ cl(Y) with head x and frontier F has y ∈ F ∪ {x}, a non-zero
ρ-value on X ∩ (F ∪ {x}), and no X-node strictly inside. Setting every free
node to zero keeps ρ consistent, which is what makes lift sequences exist:
offsets σ_1, ..., σ_r on Y_1, ..., Y_r where consecutive pairs stay
consistent with ρ and a non-zero σ_i(y) only occurs near the support of ρ.
"""
import logging
from typing import Iterable, Sequence

from engine.errors import InconsistentOffsetError, TreeError
from engine.treecomb.closures import closure
from engine.treecomb.consistency import OffsetFn, is_consistent, zero_completion
from engine.treecomb.trees import BinTree

logger = logging.getLogger("lrec.treecomb")


def _or(a: tuple, b: tuple) -> tuple:
    return (a[0] or b[0], a[1] or b[1])


def _fill_states(t: BinTree, region: frozenset, x: frozenset, nonzero: frozenset, y: int | None,
                 order, states: dict) -> bool:
    """
    Fill the states of `order` (deepest first) and report whether a violating
    closed connected S for y shows up. The states of a node are the reachable
    (contains y in F ∪ {head}, has a non-zero X-node in F ∪ {head}) flag pairs
    of the cuts hanging below it.
    """
    for v in order:
        own = (v == y, v in nonzero)
        options = {own}
        children = t.children(v)
        expandable = children and all(c in region for c in children)
        if expandable and v not in x:
            for a in states[children[0]]:
                for b in states[children[1]]:
                    options.add(_or(a, b))
        states[v] = options

        heads = {own}
        if expandable:
            for a in states[children[0]]:
                for b in states[children[1]]:
                    heads.add(_or(own, _or(a, b)))
        if (True, True) in heads:
            return True
    return False


def _not_free(t: BinTree, region: frozenset, x: frozenset, nonzero: frozenset, y: int,
              base: dict | None = None) -> bool:
    """
    Decide whether a violating closed connected S exists for y. Only the
    ancestors of y carry the first flag, so given the y-independent `base`
    states just that path is recomputed.
    """
    if base is None:
        base = _base_states(t, region, x, nonzero)
    path = [v for v in t.ancestors(y) if v in region]
    return _fill_states(t, region, x, nonzero, y, path, dict(base))


def _base_states(t: BinTree, region: frozenset, x: frozenset, nonzero: frozenset) -> dict:
    states: dict = {}
    _fill_states(t, region, x, nonzero, None, sorted(region, reverse=True), states)
    return states


def free_elements(t: BinTree, x: Iterable[int], y: Iterable[int], rho: OffsetFn) -> frozenset:
    """
    Raises:
        InconsistentOffsetError: if ρ is not consistent
    """
    x = t.check(x)
    if not is_consistent(t, rho):
        raise InconsistentOffsetError("free elements need a consistent offset function")
    region = closure(t, t.check(y) | x)
    nonzero = frozenset(v for v in x if rho.get(v, 0))
    if not nonzero:
        return region
    base = _base_states(t, region, x, nonzero)
    return frozenset(v for v in region if not _not_free(t, region, x, nonzero, v, base))


def forced_extension(t: BinTree, x: Iterable[int], y: Iterable[int], rho: OffsetFn) -> OffsetFn:
    """ρ together with 0 on every free node of cl(x ∪ y); always consistent."""
    free = free_elements(t, x, y, rho)
    return rho.union(OffsetFn.zero(rho.p, free - rho.domain))


# ============================================================
# Lift sequences
# ============================================================

def h_sets(t: BinTree, x: Iterable[int], rho: OffsetFn, ys: Sequence[Iterable[int]]) -> list[frozenset]:
    """
    H_1, ..., H_r. A node u with grandparent v is in H_i when T(v) holds no
    non-zero node of ρ and, for the first j ≥ i at which (Y_j ∪ X) ∩ T(v)
    fits below a single grandchild of v, that set is non-empty and lies in T(u).
    """
    x = t.check(x)
    ys = [t.check(y) for y in ys]
    marked = set()
    for v in rho.support:
        marked.update(t.ancestors(v))

    candidates = set()
    for v in x.union(*ys):
        candidates.update(u for u in t.ancestors(v) if u > 3)

    def focus(v: int, nodes: frozenset):
        # (contained, grandchild) for (nodes ∪ X) ∩ T(v)
        inside = [z for z in nodes | x if t.in_subtree(z, v)]
        if not inside:
            return True, None
        target = t.depth(v) + 2
        grand = set()
        for z in inside:
            gap = t.depth(z) - target
            if gap < 0:
                return False, None
            grand.add(z >> gap)
        if len(grand) == 1:
            return True, grand.pop()
        return False, None

    result = []
    for i in range(len(ys)):
        members = set()
        for u in sorted(candidates):
            v = u // 4
            if v in marked:
                continue
            for j in range(i, len(ys)):
                contained, grandchild = focus(v, ys[j])
                if contained:
                    if grandchild == u:
                        members.add(u)
                    break
        result.append(frozenset(members))
    return result


def lift_sequence(t: BinTree, x: Iterable[int], rho: OffsetFn, ys: Sequence[Iterable[int]],
                  s: int | None = None) -> list[OffsetFn]:
    """
    Build σ_1, ..., σ_r. With ρ_i = ρ ∪ 0 on H_i, each step takes
    η = ρ_{i+1} ∪ σ_i, zeroes the free nodes of C = cl(X ∪ Y_i ∪ Y_{i+1} ∪ H_{i+1}),
    completes the result consistently on C and restricts it to Y_{i+1}.

    Raises:
        InconsistentOffsetError: if ρ is not consistent
        TreeError: if x is not dom ρ or some |Y_i| exceeds s
    """
    x = t.check(x)
    if x != rho.domain:
        raise TreeError("x must be the domain of the offset function")
    if not is_consistent(t, rho):
        raise InconsistentOffsetError("lift sequences need a consistent offset function")
    ys = [t.check(y) for y in ys]
    if s is None:
        s = max((len(y) for y in ys), default=0)
    for y in ys:
        if len(y) > s:
            raise TreeError(f"|Y| = {len(y)} exceeds s = {s}")

    hs = h_sets(t, x, rho, ys)
    previous = OffsetFn(rho.p)
    previous_y: frozenset = frozenset()
    sigmas = []
    for y, h in zip(ys, hs):
        eta = rho.union(OffsetFn.zero(rho.p, h)).union(previous)
        target = x | previous_y | y | h
        completed = zero_completion(t, forced_extension(t, eta.domain, target, eta), target)
        sigma = completed.restrict(y)
        sigmas.append(sigma)
        previous, previous_y = sigma, y
    logger.debug("[Lift] %d offsets over %d nodes of support", len(sigmas), len(rho.support))
    return sigmas


def check_lift_conditions(t: BinTree, rho: OffsetFn, ys: Sequence[Iterable[int]],
                          sigmas: Sequence[OffsetFn], s: int) -> list[str]:
    """
    Post-hoc check of a lift sequence.

    Returns:
        Empty list when both conditions hold, otherwise one message per violation.
    """
    problems = []
    ys = [frozenset(y) for y in ys]
    if len(ys) != len(sigmas):
        return [f"{len(sigmas)} offsets for {len(ys)} sets"]
    for i, (y, sigma) in enumerate(zip(ys, sigmas), start=1):
        if sigma.domain != y:
            problems.append(f"σ_{i} is not defined exactly on Y_{i}")

    for i in range(len(sigmas) - 1):
        try:
            joined = rho.union(sigmas[i]).union(sigmas[i + 1])
        except InconsistentOffsetError as exc:
            problems.append(f"σ_{i + 1} and σ_{i + 2} disagree: {exc}")
            continue
        if not is_consistent(t, joined):
            problems.append(f"ρ ∪ σ_{i + 1} ∪ σ_{i + 2} is inconsistent")

    gap = 2 * (len(rho) + s)
    support = rho.support
    for i, sigma in enumerate(sigmas, start=1):
        for y in sorted(sigma.support):
            if not any(t.height(y) >= t.height(v) - gap for v in support):
                problems.append(f"σ_{i}({y}) is non-zero too far below the support of ρ")
    return problems
