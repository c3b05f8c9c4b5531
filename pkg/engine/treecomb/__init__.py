from engine.treecomb.trees import BinTree, max_height, min_height
from engine.treecomb.closures import (
    ClosedComponent, closure, components, encloses, frontier, is_closed, minimally_encloses,
)
from engine.treecomb.consistency import (
    OffsetFn, enclosing_sum_criterion, extend_consistent, is_consistent, zero_completion,
)
from engine.treecomb.lifts import check_lift_conditions, forced_extension, free_elements, h_sets, lift_sequence
