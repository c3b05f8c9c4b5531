"""
Size measures on formulas: quantifier rank, iteration degree, free variables.
"""
from engine.logic.formulas import (
    And, Atom, Count, Eq, Exists, Forall, Formula, Lfp, Lrec, Not, Or, Truth, term_vars,
)


def rank(phi: Formula) -> int:
    """
    Atoms have rank 0; quantifiers and counting add one; connectives take
    the maximum of their children; lrec uses
    max(2c + rank(sim), 2c + rank(edge), c + d + rank(label)).
    """
    match phi:
        case Truth() | Atom() | Eq():
            return 0
        case Not(body):
            return rank(body)
        case And(left, right) | Or(left, right):
            return max(rank(left), rank(right))
        case Exists(_, body) | Forall(_, body) | Count(_, body, _):
            return 1 + rank(body)
        case Lfp(vars=xs, body=body):
            return len(xs) + rank(body)
        case Lrec():
            c, d = phi.c, phi.d
            return max(2 * c + rank(phi.sim), 2 * c + rank(phi.edge), c + d + rank(phi.label))
    raise TypeError(f"not a formula: {phi!r}")


def iteration_degree(phi: Formula) -> int:
    match phi:
        case Truth() | Atom() | Eq():
            return 0
        case Not(body) | Exists(_, body) | Forall(_, body) | Count(_, body, _) | Lfp(body=body):
            return iteration_degree(body)
        case And(left, right) | Or(left, right):
            return max(iteration_degree(left), iteration_degree(right))
        case Lrec():
            return max(phi.q, iteration_degree(phi.sim), iteration_degree(phi.edge),
                       iteration_degree(phi.label))
    raise TypeError(f"not a formula: {phi!r}")


def free_variables(phi: Formula) -> frozenset:
    match phi:
        case Truth():
            return frozenset()
        case Atom(args=args):
            return term_vars(args)
        case Eq(left, right):
            return term_vars((left, right))
        case Not(body):
            return free_variables(body)
        case And(left, right) | Or(left, right):
            return free_variables(left) | free_variables(right)
        case Exists(var, body) | Forall(var, body):
            return free_variables(body) - {var}
        case Count(var, body, number):
            return (free_variables(body) - {var}) | term_vars((number,))
        case Lfp(vars=xs, body=body, args=args):
            return (free_variables(body) - set(xs)) | term_vars(args)
        case Lrec():
            pair_vars = set(phi.us) | set(phi.vs)
            return ((free_variables(phi.edge) - pair_vars)
                    | (free_variables(phi.sim) - pair_vars)
                    | (free_variables(phi.label) - set(phi.us) - set(phi.ps))
                    | term_vars(phi.ws) | term_vars(phi.rs))
    raise TypeError(f"not a formula: {phi!r}")
