"""Admissible fibre parameters and their cubic-field certificates.

A parameter t inside the admissibility profile pins a fibre cubic
W³ + a₂(t)W² + a₁(t)W + a₀(t) whose root generates the field Q(P_t).
Outside a thin set of Hilbert-exceptional parameters the cubic is
irreducible, and the certificate checks the two conditions that make the
pulled-back values x_i = h_i(P_t)/h_i(P₀) trivial in every local square
class over the bad set: even valuation at each place over each bad prime,
positive sign at each real embedding. Independence of the x_i inside
K*/K*² is bounded from below by residue evidence at auxiliary primes.

Everything is exact. Place valuations come from Newton polygons of shifted
fibre cubics, never from floating point or truncated p-adic digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .algebra import numutil
from .algebra.padic import padic_splitting, poly_valuations, root_valuations, valuation
from .algebra.unipoly import UniPoly
from .twotorsion import TorsionError, matrix_rank_f2


class FamilyError(Exception):
    pass


class HilbertExceptionalError(FamilyError):
    """Reducible fibre: the parameter lies in the thin exceptional set."""

    def __init__(self, t, reason):
        super().__init__("Hilbert-exceptional t = %s: %s" % (t, reason))
        self.t = t
        self.reason = reason


@dataclass(frozen=True)
class CubicField:
    """Q(P_t), presented by the monic fibre cubic of its generator.

    discriminant is that of a primitive integer model of the cubic (the
    field discriminant divides it; we never need the exact one)."""

    cubic: UniPoly
    discriminant: int
    real_embeddings: int


@dataclass(frozen=True)
class PlaceParity:
    """ord_w(x_i) at one place w | prime, with the splitting data of w.

    The place label is the position in the sorted splitting list. When
    three degree-one places share the prime the labels follow decreasing
    valuation per x_i; parity verdicts do not depend on that choice."""

    index: int
    prime: int
    place: int
    e: int
    f: int
    order: int

    @property
    def passed(self):
        return self.order % 2 == 0


@dataclass(frozen=True)
class SignCheck:
    """Sign of x_i at one real embedding of the fibre field."""

    index: int
    embedding: int
    positive: bool

    @property
    def passed(self):
        return self.positive


@dataclass(frozen=True)
class IndependenceEvidence:
    """F₂ evidence rows (one per x_i) and the rank they certify."""

    rank: int
    rows: tuple
    aux_primes: tuple


@dataclass(frozen=True)
class FieldCertificate:
    t: Fraction
    field: CubicField
    parity_checks: tuple
    sign_checks: tuple
    independence_rank: int
    evidence: IndependenceEvidence
    independence: str
    overall: str


_STRATEGIES = {"positive": 1, "negative": -1}


def enumerate_admissible(profile, count, strategy="positive"):
    """The `count` admissible parameters of smallest height, deterministic.

    Admissible means |t|_p <= p^(-k_p) at every finite place of the profile
    and |t| below the archimedean radius; concretely t = sign * (M*n)/d
    with M = prod p^(k_p), gcd(n*M, d) = 1, d coprime to every profile
    prime. Since |t| < 1 the height is the denominator, so denominators
    increase outward and numerators break ties. strategy fixes the sign
    ("positive" or "negative")."""
    if strategy not in _STRATEGIES:
        raise FamilyError("unknown enumeration strategy %r" % (strategy,))
    sign = _STRATEGIES[strategy]
    bound = profile.archimedean_bound
    if bound <= 0:
        raise FamilyError("empty archimedean region")
    M = 1
    for p, k in profile.finite_places.items():
        M *= p ** k
    out = []
    d = int(M / bound) + 1
    while len(out) < count:
        if gcd(M, d) == 1:
            n = 1
            while len(out) < count and Fraction(M * n, d) < bound:
                if gcd(n, d) == 1:
                    out.append(Fraction(sign * M * n, d))
                n += 1
        d += 1
    return out


def fibre_field(model, t):
    """The cubic field cut out by the fibre of the model over t.

    Raises HilbertExceptionalError on a reducible (or inseparable) fibre
    so callers can log the parameter and skip it."""
    t = Fraction(t)
    cubic = model.fibre_cubic(t)
    roots = numutil.rational_roots(cubic)
    if roots:
        raise HilbertExceptionalError(t, "fibre cubic has rational root %s" % (roots[0][0],))
    disc = cubic.discriminant()
    if not disc:
        raise HilbertExceptionalError(t, "fibre cubic is inseparable")
    ints, _ = numutil.clear_denominators(cubic)
    idisc = UniPoly.from_ints(ints).discriminant()
    if idisc.denominator != 1:
        raise FamilyError("integer model has non-integer discriminant")
    return CubicField(cubic, int(idisc), 3 if disc > 0 else 1)


def _as_integer(x):
    if x.denominator != 1:
        raise FamilyError("non-integral place valuation %s" % (x,))
    return int(x)


def _place_orders(cubic, places, p, gamma, const):
    """[(e, f, ord_w(gamma*theta + const))] for the places w | p.

    The valuation multiset comes from the Newton polygon of the shifted
    cubic; conjugate roots share a valuation, so degrees force the match
    between values and places whenever it matters."""
    if not gamma:
        if not const:
            raise FamilyError("x = 0 has no valuation")
        v = valuation(const, p)
        return [(e, f, _as_integer(e * v)) for e, f in places]
    vg = valuation(gamma, p)
    shifted = cubic.shift(-const / gamma)
    if not shifted.coeffs[0]:
        raise FamilyError("x vanishes at a root of the fibre cubic; "
                          "move the divisor representative")
    vals = root_valuations(list(enumerate(poly_valuations(shifted, p))))
    if sum(c for _, c in vals) != 3:
        raise FamilyError("valuation multiset does not cover the fibre")
    if len(places) == 1:
        if len(vals) != 1:
            raise FamilyError("conjugate roots disagree on valuation")
        e, f = places[0]
        return [(e, f, _as_integer(e * (vals[0][0] + vg)))]
    if len(places) == 2:
        small, big = places
        if len(vals) == 1:
            vsmall = vbig = vals[0][0]
        elif len(vals) == 2:
            (va, ca), (vb, cb) = vals
            if ca == 2:
                vbig, vsmall = va, vb
            elif cb == 2:
                vbig, vsmall = vb, va
            else:
                raise FamilyError("valuation multiplicities do not match places")
        else:
            raise FamilyError("valuation multiset does not match places")
        return [(small[0], small[1], _as_integer(small[0] * (vsmall + vg))),
                (big[0], big[1], _as_integer(big[0] * (vbig + vg)))]
    flat = []
    for v, c in vals:
        flat.extend([v] * c)
    return [(e, f, _as_integer(e * (v + vg)))
            for (e, f), v in zip(places, flat)]


def _positive_at_root(cubic, lo, hi, gamma, const):
    """Sign of gamma*W + const at the real root isolated by [lo, hi]."""
    if not gamma:
        if not const:
            raise FamilyError("sign check on the zero function")
        return const > 0
    for _ in range(200):
        a = gamma * lo + const
        b = gamma * hi + const
        if a and b and (a > 0) == (b > 0):
            return a > 0
        if lo == hi:
            raise FamilyError("fibre root coincides with a zero of h")
        lo, hi = numutil.refine_root_interval(cubic, lo, hi, (hi - lo) / 4)
    raise FamilyError("sign refinement did not converge")


def _aux_prime_bits(cubic, xs, skip, budget):
    """Legendre bits of the x residues at completely split primes.

    Primes come in ascending order, skipping the bad set and any prime
    meeting a denominator or a residue of zero, until the budget is spent."""
    bits = [[] for _ in xs]
    used = []
    if budget <= 0:
        return bits, used
    for q in numutil.primes_upto(50000):
        if len(used) >= budget:
            break
        if q in skip:
            continue
        if any(c.denominator % q == 0 for c in cubic.coeffs):
            continue
        if any(g.denominator % q == 0 or c.denominator % q == 0 for g, c in xs):
            continue
        _, factors = numutil.factor_poly_mod_p(cubic, q)
        if len(factors) != 3 or any(len(c) != 2 or m != 1 for c, m in factors):
            continue
        roots = sorted((q - c[0]) % q for c, _ in factors)
        residues = [[(g.numerator * pow(g.denominator, -1, q) * r
                      + c.numerator * pow(c.denominator, -1, q)) % q
                     for r in roots] for g, c in xs]
        if any(b == 0 for row in residues for b in row):
            continue
        for row, res in zip(bits, residues):
            row.extend(0 if pow(b, (q - 1) // 2, q) == 1 else 1 for b in res)
        used.append(q)
    return bits, used


def independence_rank(field, xs, primes, budget=16):
    """Lower bound for the F₂-rank of <x_1, ..., x_n> inside K*/K*².

    Each x is a (gamma, const) pair standing for gamma*theta + const, theta
    a root of the field cubic. Evidence columns: valuation parities at the
    places over the given primes, sign bits at the real embeddings, and
    Legendre bits at up to `budget` completely split auxiliary primes.
    When three degree-one places over a prime cannot be told apart the
    three parities collapse to their sum (the norm parity), which keeps
    the rank a true lower bound."""
    cubic = field.cubic
    for g, c in xs:
        if not g and not c:
            raise FamilyError("x = 0 has no square class")
    rows = [[] for _ in xs]
    for p in sorted({int(p) for p in primes}):
        places = padic_splitting(cubic, p)
        orders = [_place_orders(cubic, places, p, g, c) for g, c in xs]
        for row, ords in zip(rows, orders):
            if len(places) == 3:
                row.append(sum(o for _, _, o in ords) & 1)
            else:
                row.extend(o & 1 for _, _, o in ords)
    for lo, hi in numutil.real_root_intervals(cubic):
        for row, (g, c) in zip(rows, xs):
            row.append(0 if _positive_at_root(cubic, lo, hi, g, c) else 1)
    aux_bits, aux = _aux_prime_bits(cubic, xs, {int(p) for p in primes}, budget)
    for row, extra in zip(rows, aux_bits):
        row.extend(extra)
    return IndependenceEvidence(matrix_rank_f2(rows), tuple(tuple(r) for r in rows),
                                tuple(aux))


def certify(model, h_list, profile, t, aux_budget=16):
    """Certificate for the square-class conditions on x_i = h_i(P_t)/h_i(P₀).

    Normalizes each h so that h(P₀) = 1, then checks at every profile prime
    that every place valuation of x_i is even, and at every real embedding
    of the fibre field that x_i is positive. overall is PASS exactly when
    all those checks pass; the independence rank is recorded as evidence,
    marked INCONCLUSIVE-INDEPENDENCE when it stays below the number of
    functions after the auxiliary budget is spent."""
    if not h_list:
        raise FamilyError("no kummer functions supplied")
    t = Fraction(t)
    normalized = []
    for h in h_list:
        try:
            normalized.append(h.normalized_function())
        except TorsionError:
            raise FamilyError("support of h_%d passes through the base point; "
                              "move the divisor representative" % h.index)
    field = fibre_field(model, t)
    xs = []
    for h in normalized:
        g, c = h.gamma, (h.alpha * t + h.beta) * t + Fraction(1)
        if not g and not c:
            raise FamilyError("h_%d vanishes on the whole fibre over t = %s; "
                              "move the divisor representative" % (h.index, t))
        xs.append((g, c))
    parity = []
    for p in profile.places():
        places = padic_splitting(field.cubic, p)
        for h, (g, c) in zip(normalized, xs):
            for w, (e, f, o) in enumerate(_place_orders(field.cubic, places, p, g, c)):
                parity.append(PlaceParity(h.index, p, w, e, f, o))
    intervals = numutil.real_root_intervals(field.cubic)
    if len(intervals) != field.real_embeddings:
        raise FamilyError("real embedding count disagrees with the discriminant sign")
    signs = []
    for emb, (lo, hi) in enumerate(intervals):
        for h, (g, c) in zip(normalized, xs):
            signs.append(SignCheck(h.index, emb,
                                   _positive_at_root(field.cubic, lo, hi, g, c)))
    evidence = independence_rank(field, xs, profile.places(), aux_budget)
    ok = all(pc.passed for pc in parity) and all(sc.passed for sc in signs)
    label = "CONFIRMED" if evidence.rank == len(xs) else "INCONCLUSIVE-INDEPENDENCE"
    return FieldCertificate(t=t, field=field, parity_checks=tuple(parity),
                            sign_checks=tuple(signs),
                            independence_rank=evidence.rank, evidence=evidence,
                            independence=label, overall="PASS" if ok else "FAIL")
