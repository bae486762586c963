"""Exact arithmetic substrate: linear algebra, polynomials, number fields,
and p-adic primitives.

Everything works over field elements that are falsy iff zero (Fraction,
NumberFieldElem), with Bareiss elimination for integral-domain entries
(integers, polynomials).
"""

from .linalg import LinearSolution, det, det_bareiss, kernel_basis, rref, solve_linear_system
from .numberfield import NumberField, NumberFieldElem
from .padic import (
    INF,
    dedekind_index_divisible,
    min_root_valuation,
    newton_polygon_slopes,
    newton_polygon_vertices,
    padic_splitting,
    poly_valuations,
    reduce_mod_p,
    root_valuations,
    valuation,
)
from .triform import TriForm, jacobian_determinant, monomials_of_degree
from .unipoly import UniPoly, resultant_in_w

__all__ = [
    "INF",
    "LinearSolution",
    "NumberField",
    "NumberFieldElem",
    "TriForm",
    "UniPoly",
    "dedekind_index_divisible",
    "det",
    "det_bareiss",
    "jacobian_determinant",
    "kernel_basis",
    "min_root_valuation",
    "monomials_of_degree",
    "newton_polygon_slopes",
    "newton_polygon_vertices",
    "padic_splitting",
    "poly_valuations",
    "rref",
    "reduce_mod_p",
    "resultant_in_w",
    "root_valuations",
    "solve_linear_system",
    "valuation",
]
