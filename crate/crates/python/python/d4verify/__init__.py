from ._d4verify import (
    Transcript,
    b_nu,
    closed_form_v,
    find_intersections,
    hypergeometric_eliminates,
    is_d4_tuple,
    reduce_pair,
    regular_extensions,
    sextuple_m_bound,
)

__all__ = [
    "Transcript",
    "b_nu",
    "closed_form_v",
    "find_intersections",
    "hypergeometric_eliminates",
    "is_d4_tuple",
    "reduce_pair",
    "regular_extensions",
    "sextuple_m_bound",
]
