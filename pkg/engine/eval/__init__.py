from engine.eval.budget import DEFAULT_MAX_NODES, DEFAULT_MAX_PAIRS, Budget, NodeMode, node_domain, sort_domain
from engine.eval.semigraphs import (
    ChiEvaluator, LabelledGraph, LabelledSemiGraph, QuotientGraph, chi, chi_hat, quotient,
    semigraph_from_json, semigraph_to_json,
)
from engine.eval.evaluator import Evaluator, build_semigraph, eval_formula, eval_lrec
from engine.eval.interpretations import Interpretation, SemiGraphInterpretation, apply_interpretation
