from engine.strategy.offsets import (
    guarantee_size, null_height, offset_bijection, rho_from_injection, shift_tuple, spike, spike_closure,
    total_offset_bijection, tuple_nodes,
)
from engine.strategy.duplicator import (
    DupStrategyState, OffsetDuplicator, duplicator_extension_response, duplicator_graph_response, is_free_in_class,
)
from engine.strategy.spoiler import FormulaSpoiler, GreedySpoiler, RandomSpoiler
from engine.strategy.registry import DUPLICATORS, SPOILERS, make_duplicator, make_spoiler
from engine.strategy.harness import HarnessResult, run_harness

spoiler_formula_agent = FormulaSpoiler
