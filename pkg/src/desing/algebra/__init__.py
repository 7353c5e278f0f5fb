"""Exact polynomial and ideal arithmetic over the rationals."""

from .decompose import (
    DecompositionUnsupported,
    components_of,
    factor,
    intersect,
    is_smooth,
    prime_is_smooth,
    radical,
)
from .groebner import groebner, normal_form
from .ideal import (
    INF,
    Ideal,
    delta,
    delta_power,
    dimension,
    groebner_basis,
    ideal_contains,
    locus_contains,
    locus_empty,
    max_order,
    order_along,
    order_at_point,
    radical_contains,
    same_locus,
    saturate,
    var_power,
)
from .parse import ParseError, parse_poly
from .poly import Poly, VarContext, degrevlex, elimination, format_poly, format_rational, lex
