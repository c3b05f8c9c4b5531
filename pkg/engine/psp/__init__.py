from engine.psp.instances import (
    LFP_SENTENCE, PspInstance, TreeGroupSpec, element_id, expected_positivity, generate_instance, is_prime,
    parse_element, psp_vocabulary, shifted,
)
from engine.psp.solvers import solve_direct, solve_via_lfp, upward_closure
