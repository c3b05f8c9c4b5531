from engine.logic.formulas import (
    And, Atom, Const, Count, Eq, Exists, Forall, Formula, Lfp, Lrec, Not, NumLit, Or, Sort, Term,
    Truth, Var, Vocabulary, conjunction, term_sort,
)
from engine.logic.measures import free_variables, iteration_degree, rank
from engine.logic.parser import parse_formula, tokenize
from engine.logic.printer import print_formula, print_term
