"""Integer and polynomial factorization wrappers.

All heavy factorization goes through sympy; everything here converts to and
from the exact Fraction / UniPoly types used in the rest of the package.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import sympy

from .unipoly import UniPoly

_T = sympy.Symbol("t")


def factor_int(n):
    """Prime factorization of a nonzero integer as {p: e}, sign dropped."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("factor_int(0)")
    return {int(p): int(e) for p, e in sympy.factorint(n).items()}


def prime_divisors(n):
    return sorted(factor_int(n)) if abs(n) > 1 else []


def divisors(n):
    """Positive divisors of a nonzero integer, ascending."""
    return [int(d) for d in sympy.divisors(abs(int(n)))]

def is_prime(n):
    return bool(sympy.isprime(int(n)))


def primes_upto(n):
    return [int(p) for p in sympy.primerange(2, n + 1)]


def _to_sympy(poly):
    return sympy.Poly.from_list(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(poly.coeffs)] or [0],
        _T,
    )


def _from_sympy(spoly):
    return UniPoly(tuple(Fraction(int(c.p), int(c.q)) for c in reversed(spoly.all_coeffs())))


def factor_rational_poly(poly):
    """Irreducible factorization over Q: (constant, [(factor, multiplicity)]).

    Factors come back monic, sorted by (degree, coefficient tuple) so the
    output is deterministic.
    """
    if poly.degree < 1:
        return (poly.coeffs[0] if poly.coeffs else Fraction(0)), []
    content, factors = _to_sympy(poly).factor_list()
    out = []
    const = Fraction(int(content.p), int(content.q))
    for f, mult in factors:
        uf = _from_sympy(f)
        lc = uf.lc()
        const *= lc ** mult
        out.append((uf.monic(), int(mult)))
    out.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs))
    return const, out


def rational_roots(poly):
    """Rational roots with multiplicity, sorted."""
    _, factors = factor_rational_poly(poly)
    roots = []
    for f, m in factors:
        if f.degree == 1:
            roots.append((-f.coeffs[0], m))
    roots.sort()
    return roots


def is_irreducible(poly):
    _, factors = factor_rational_poly(poly)
    return len(factors) == 1 and factors[0][1] == 1 and factors[0][0].degree == poly.degree


def factor_poly_mod_p(poly, p):
    """Factorization mod p of a p-integral UniPoly with unit leading
    coefficient: (lc_residue, [(factor_coeffs_low_to_high, multiplicity)]).

    Factor coefficients are ints in {0, ..., p-1}; factors are monic,
    deterministically ordered.
    """
    from .padic import reduce_mod_p

    dense = [reduce_mod_p(c, p) for c in poly.coeffs]
    while dense and dense[-1] % p == 0:
        dense.pop()
    if not dense:
        raise ValueError("polynomial vanishes mod p")
    sp = sympy.Poly.from_list(list(reversed(dense)), _T, modulus=p, symmetric=False)
    content, factors = sp.factor_list()
    out = []
    for f, mult in factors:
        coeffs = [int(c) % p for c in reversed(f.all_coeffs())]
        out.append((tuple(coeffs), int(mult)))
    out.sort(key=lambda fm: (len(fm[0]), fm[0]))
    return int(content) % p, out


def real_root_intervals(poly):
    """Disjoint isolating rational intervals [(lo, hi)] for the real roots,
    in increasing order. Endpoints are exact Fractions; a root may sit on an
    endpoint."""
    sp = _to_sympy(poly)
    out = []
    for (lo, hi), _mult in sp.intervals():
        out.append((Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))))
    return out


def count_real_roots(poly):
    return len(real_root_intervals(poly))


def refine_root_interval(poly, lo, hi, width):
    """Bisect an isolating interval down to the given width.

    Assumes exactly one real root in [lo, hi] (endpoint roots allowed, as
    produced by real_root_intervals)."""
    flo, fhi = poly(lo), poly(hi)
    if not flo:
        return lo, lo
    if not fhi:
        return hi, hi
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = poly(mid)
        if not fm:
            return mid, mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo, hi


def clear_denominators(poly):
    """(integer_coeff_list, scalar) with poly = scalar * integer poly and the
    integer coefficients primitive."""
    if not poly.coeffs:
        return [], Fraction(0)
    den = 1
    for c in poly.coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in poly.coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    return ints, Fraction(g, den)


def squarefree_integer_part(n):
    """Largest squarefree divisor of |n| (the discriminant-style radical)."""
    out = 1
    for p, e in factor_int(n).items():
        if e % 2:
            out *= p
    return out


def bivariate_is_irreducible(coeff_list):
    """Irreducibility over Q of sum_i coeff_list[i](t) * W^i, the coefficients
    given as UniPoly in t."""
    w = sympy.Symbol("W")
    expr = sympy.Integer(0)
    for i, p in enumerate(coeff_list):
        if p:
            expr = expr + _to_sympy(p).as_expr() * w ** i
    if expr == 0:
        return False
    _, factors = sympy.factor_list(expr, w, _T)
    nontrivial = sum(mult for f, mult in factors if f.free_symbols)
    return nontrivial == 1
