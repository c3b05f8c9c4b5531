from engine.core.structures import (
    NumberDomain,
    Relation,
    Structure,
    Value,
    decode_number_tuple,
    encode_number_tuple,
    format_tuple,
    format_value,
    is_element,
    is_number,
    structure_from_json,
    structure_to_json,
    tuple_elements,
    validate_structure,
)
from engine.core.injections import PartialInjection, compose_injection, is_partial_isomorphism
