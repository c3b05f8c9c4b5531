"""
Canonical concrete syntax. parse_formula(print_formula(phi)) == phi.
"""
from engine.logic.formulas import (
    And, Atom, Const, Count, Eq, Exists, Forall, Formula, Lfp, Lrec, Not, NumLit, Or, Truth, Var,
)


def print_term(term) -> str:
    match term:
        case Var():
            return str(term)
        case Const(name):
            return name
        case NumLit(value):
            return str(value)
    raise TypeError(f"not a term: {term!r}")


def _terms(terms) -> str:
    return ",".join(print_term(t) for t in terms)


def _operand(phi: Formula) -> str:
    # binary connectives and quantifiers need parentheses as operands; atoms,
    # equalities, negations and the braced or bracketed count, lfp and lrec
    # forms end where they start
    if isinstance(phi, (And, Or, Exists, Forall)):
        return f"({print_formula(phi)})"
    return print_formula(phi)


def print_formula(phi: Formula) -> str:
    match phi:
        case Truth(value):
            return "true" if value else "false"
        case Atom(relation, args):
            return f"{relation}({_terms(args)})"
        case Eq(left, right):
            return f"{print_term(left)} = {print_term(right)}"
        case Not(body):
            return f"!{_operand(body)}"
        case And(left, right):
            return f"{_operand(left)} & {_operand(right)}"
        case Or(left, right):
            return f"{_operand(left)} | {_operand(right)}"
        case Exists(var, body):
            return f"exists {var}. {print_formula(body)}"
        case Forall(var, body):
            return f"forall {var}. {print_formula(body)}"
        case Count(var, body, number):
            return f"count{{{var} : {print_formula(body)}}} = {print_term(number)}"
        case Lfp(relvar, xs, body, args):
            return f"lfp[{relvar},{_terms(xs)}]({print_formula(body)})({_terms(args)})"
        case Lrec():
            head = f"lrec[{_terms(phi.us)};{_terms(phi.vs)};{_terms(phi.ps)}]"
            bodies = f"({print_formula(phi.edge)};{print_formula(phi.sim)};{print_formula(phi.label)})"
            return f"{head}{bodies}({_terms(phi.ws)};{_terms(phi.rs)})"
    raise TypeError(f"not a formula: {phi!r}")
