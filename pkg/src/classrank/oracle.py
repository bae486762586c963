"""Elliptic instance of the descent machinery with an exact endpoint.

E: y² = x(x + a)(x + b) has full rational 2-torsion, and the coordinate x
is a degree-2 map totally ramified at the base point P₀ = (0, 0) over
x = 0, so it plays the role the trigonal parameter plays for the genus-4
family. The descent functions h₁ = (x + a)(x + b) and h₂ = x + a have
square divisors; for admissible q the normalized values x_i = h_i(q)/h_i(0)
are p-adic unit squares at every bad place, the quadratic fibre field
K = Q(√(q(q+a)(q+b))) acquires the unramified extensions K(√x_i), and on
the imaginary side the conclusion is checkable form by form: the class
group of K is a finite group of reduced binary quadratic forms whose
2-rank must be at least the number of independent x_i.

Everything here is exact integer arithmetic: class groups come from
reduced-form enumeration and Gauss composition, never from analytic class
number approximations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .algebra.numutil import divisors, factor_int, prime_divisors, \
    squarefree_integer_part
from .algebra.padic import valuation
from .branchcurve import INFINITE_PARAM
from .family import enumerate_admissible
from .localbounds import AdmissibilityProfile, lambda_at_place
from .twotorsion import KummerFunction


class OracleError(Exception):
    pass


_ENUMERATION_CAP = 10 ** 6


# ---------------------------------------------------------------------------
# binary quadratic forms


def _check_discriminant(disc):
    if disc >= 0:
        raise OracleError("positive discriminants are out of scope")
    if disc % 4 not in (0, 1):
        raise OracleError("discriminant must be 0 or 1 mod 4")


def principal_form(disc):
    """The identity class: (1, 0, -D/4) or (1, 1, (1-D)/4)."""
    _check_discriminant(disc)
    b = disc % 2
    return (1, b, (b * b - disc) // 4)


def reduce_form(a, b, c):
    """The reduced representative of a positive definite form class:
    |B| <= A <= C with B >= 0 on the boundary |B| = A or A = C."""
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise OracleError("positive definite form required")
    while True:
        if -a < b <= a:
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return (a, b, c)
        disc = b * b - 4 * a * c
        b -= 2 * a * ((b + a) // (2 * a))
        if b == -a:
            b = a
        c = (b * b - disc) // (4 * a)


def reduced_forms(disc):
    """All reduced primitive forms of a negative discriminant, sorted.

    One form per class, so the length is the class number."""
    _check_discriminant(disc)
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
        a += 1
    out.sort()
    return out


def compose_forms(f1, f2):
    """Gauss composition of two primitive forms of the same discriminant,
    reduced. Dirichlet's construction: with d = gcd(a1, a2, (b1+b2)/2) the
    composed form has A = a1 a2 / d² and a middle coefficient solving the
    three defining congruences."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    disc = b1 * b1 - 4 * a1 * c1
    if b2 * b2 - 4 * a2 * c2 != disc:
        raise OracleError("forms have different discriminants")
    s = (b1 + b2) // 2
    n = (b1 - b2) // 2
    d0, _, y0 = _xgcd(a1, a2)
    d, x1, y1 = _xgcd(d0, s)
    big_a = (a1 // d) * (a2 // d)
    mu = x1 * y0 * n - y1 * c2
    big_b = (b2 + 2 * (a2 // d) * mu) % (2 * big_a)
    big_c = (big_b * big_b - disc) // (4 * big_a)
    return reduce_form(big_a, big_b, big_c)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _form_power(form, k, identity):
    out = identity
    base = form
    while k:
        if k & 1:
            out = compose_forms(out, base)
        base = compose_forms(base, base)
        k >>= 1
    return out


@dataclass(frozen=True)
class FormClassGroup:
    """The class group of a negative discriminant as explicit data: one
    reduced form per class and the invariant factor decomposition."""

    discriminant: int
    forms: tuple
    elementary_divisors: tuple

    @property
    def class_number(self):
        return len(self.forms)

    def two_rank(self):
        return sum(1 for d in self.elementary_divisors if d % 2 == 0)


def form_class_group(disc):
    """Full group structure by enumeration and composition.

    Capped at |D| <= 10⁶; beyond that use class_group_2rank, which only
    needs the order-2 classes."""
    _check_discriminant(disc)
    if -disc > _ENUMERATION_CAP:
        raise OracleError("form enumeration capped at |D| <= 10^6")
    forms = reduced_forms(disc)
    identity = principal_form(disc)
    eds = _elementary_divisors(forms, identity)
    group = FormClassGroup(disc, tuple(forms), eds)
    size = 1
    for d in eds:
        size *= d
    if size != group.class_number:
        raise OracleError("invariant factors do not multiply to the class number")
    return group


def _elementary_divisors(forms, identity):
    # the q-part structure falls out of the kernel sizes of the q^j power
    # maps: log_q #ker grows by the number of cyclic factors of exponent >= j
    h = len(forms)
    parts = {}
    for q, e in sorted(factor_int(h).items()):
        lams = [0]
        for j in range(1, e + 1):
            cnt = sum(1 for f in forms
                      if _form_power(f, q ** j, identity) == identity)
            lam = 0
            while cnt > 1:
                if cnt % q:
                    raise OracleError("power kernel size is not a prime power")
                cnt //= q
                lam += 1
            lams.append(lam)
            if lam == e:
                break
        rs = [lams[i] - lams[i - 1] for i in range(1, len(lams))]
        exps = []
        for j in range(1, len(rs) + 1):
            nxt = rs[j] if j < len(rs) else 0
            exps.extend([j] * (rs[j - 1] - nxt))
        parts[q] = sorted(exps, reverse=True)
    width = max((len(v) for v in parts.values()), default=0)
    inv = []
    for i in range(width):
        d = 1
        for q, exps in parts.items():
            if i < len(exps):
                d *= q ** exps[i]
        inv.append(d)
    inv.reverse()
    return tuple(inv)


def class_group_2rank(disc):
    """Exact 2-rank of Cl(D) for D < 0.

    Within the enumeration cap the order-2 classes are counted twice over,
    once as solutions of f∘f = identity under composition and once by the
    reduced boundary shapes (B = 0, B = A, or A = C); the counts must
    agree. Beyond the cap only the boundary shapes are enumerated, from
    the divisors of |D|."""
    _check_discriminant(disc)
    if -disc <= _ENUMERATION_CAP:
        forms = reduced_forms(disc)
        identity = principal_form(disc)
        kernel = sum(1 for f in forms if compose_forms(f, f) == identity)
        shapes = sum(1 for (a, b, c) in forms if b == 0 or b == a or a == c)
        if kernel != shapes:
            raise OracleError("composition and reduction disagree on Cl[2]")
        count = kernel
    else:
        count = len(_ambiguous_divisor_forms(disc))
    rank = count.bit_length() - 1
    if 1 << rank != count:
        raise OracleError("order-2 class count is not a power of two")
    return rank


def _ambiguous_divisor_forms(disc):
    """The reduced primitive forms of order <= 2, found from the divisors
    of |D| instead of a full scan: they are exactly the boundary shapes
    (A, 0, C), (A, A, C), (A, B, A)."""
    n = -disc
    out = set()
    if n % 4 == 0:
        m = n // 4
        for a in divisors(m):
            if a * a > m:
                break
            c = m // a
            if gcd(a, c) == 1:
                out.add((a, 0, c))
    for a in divisors(n):
        if 3 * a * a > n:
            break
        if (a * a + n) % (4 * a):
            continue
        c = (a * a + n) // (4 * a)
        if gcd(a, c) == 1:
            out.add((a, a, c))
    for u in divisors(n):
        v = n // u
        if u > v:
            break
        if (u + v) % 4:
            continue
        a = (u + v) // 4
        b = (v - u) // 2
        if b > a:
            continue
        if gcd(a, b) == 1:
            out.add((a, b, a))
    return sorted(out)


# ---------------------------------------------------------------------------
# the quadratic family


@dataclass(frozen=True)
class QuadFamily:
    """y² = x(x + a)(x + b) with the local data for its x-parameter.

    functions holds the normalized descent values as polynomials in the
    parameter q (the W coefficient is zero: both are functions of x alone,
    so their fibre values are rational)."""

    roots: tuple
    functions: tuple
    profile: AdmissibilityProfile

    @property
    def a(self):
        return -self.roots[1]

    @property
    def b(self):
        return -self.roots[2]


@dataclass(frozen=True)
class MemberCheck:
    """Local square verdicts for one parameter value: checks holds
    (function index, prime, passed) for every bad prime."""

    q: Fraction
    values: tuple
    checks: tuple
    certified: bool


@dataclass(frozen=True)
class QuadMember:
    """A certified member with its exact class-group data. conductor > 1
    records that the naive order Z[√(num·den)] was non-maximal and the
    discriminant was reduced to the fundamental one."""

    q: Fraction
    values: tuple
    kernels: tuple
    radicand: int
    fundamental_discriminant: int
    conductor: int
    two_rank: int


@dataclass(frozen=True)
class OracleReport:
    family: QuadFamily
    strategy: str
    members: tuple
    skipped: tuple
    minimum_rank: object
    mean_rank: object


def build_quad_family(a, b):
    """Family data for roots (0, -a, -b): normalized descent functions,
    bad places {2} ∪ (primes of a b (a-b)), and verified local exponents.

    The functions have no fibre coordinate, so the exponent at p is the
    contraction exponent itself; the archimedean radius additionally stays
    strictly between the nonzero roots, so the sign of the fibre quantity
    q(q+a)(q+b) over the whole admissible interval is the sign of a·b·q."""
    a = Fraction(a)
    b = Fraction(b)
    if not a or not b or a == b:
        raise OracleError("roots 0, -a, -b must be distinct")
    h1 = KummerFunction(1, 1 / (a * b), (a + b) / (a * b), Fraction(0),
                        Fraction(1))
    h2 = KummerFunction(2, Fraction(0), 1 / a, Fraction(0), Fraction(1))
    functions = (h1, h2)
    bad = {2}
    for r in (a, b, a - b):
        bad.update(prime_divisors(r.numerator * r.denominator))
    finite = {}
    provenance = {}
    for p in sorted(bad):
        m = lambda_at_place(functions, p)
        target = 3 if p == 2 else 1
        margins = []
        for h in functions:
            terms = []
            if h.alpha:
                terms.append(valuation(h.alpha, p) + 2 * m)
            if h.beta:
                terms.append(valuation(h.beta, p) + m)
            margins.append((h.index, min(terms)))
        if any(margin < target for _, margin in margins):
            raise OracleError("derived exponent failed verification at %d" % p)
        finite[p] = m
        provenance[p] = {"lambda": m, "margins": tuple(margins)}
    radius = lambda_at_place(functions, INFINITE_PARAM)
    bound = min(radius, Fraction(1, 2), abs(a) / 2, abs(b) / 2)
    provenance[INFINITE_PARAM] = {"radius": bound}
    profile = AdmissibilityProfile(finite, bound, provenance)
    return QuadFamily((Fraction(0), -a, -b), functions, profile)


def _local_square(x, p):
    """Exact membership of a nonzero rational in the p-adic squares."""
    v = valuation(x, p)
    if v % 2:
        return False
    u = x / Fraction(p) ** v
    if p == 2:
        return (u.numerator * pow(u.denominator, -1, 8)) % 8 == 1
    r = (u.numerator * pow(u.denominator, -1, p)) % p
    return pow(r, (p - 1) // 2, p) == 1


def certify_member(family, q):
    """Square checks for one parameter value: each normalized descent value
    must be a p-adic square at every bad prime. Stronger than a valuation
    parity check and still exact, because the values are rational."""
    values = tuple(h(q, 0) for h in family.functions)
    checks = []
    certified = True
    for h, x in zip(family.functions, values):
        if not x:
            raise OracleError("descent value vanishes at q = %s" % q)
        for p in family.profile.places():
            good = _local_square(x, p)
            checks.append((h.index, p, good))
            certified = certified and good
    return MemberCheck(q, values, tuple(checks), certified)


def _squarefree_kernel(r):
    n = r.numerator * r.denominator
    kernel = squarefree_integer_part(n)
    return -kernel if n < 0 else kernel


def fibre_discriminant(family, q):
    """(radicand, fundamental discriminant, conductor) of the fibre field
    Q(√(q(q+a)(q+b)))."""
    d = q * (q + family.a) * (q + family.b)
    if not d:
        raise OracleError("q collides with a root of the fibre quantity")
    kernel = _squarefree_kernel(d)
    if kernel == 1:
        raise OracleError("fibre field degenerates to Q at q = %s" % q)
    disc = kernel if kernel % 4 == 1 else 4 * kernel
    n = d.numerator * d.denominator
    raw = n if n % 4 == 1 else 4 * n
    conductor = isqrt(raw // disc)
    if conductor * conductor * disc != raw:
        raise OracleError("conductor is not integral")
    return kernel, disc, conductor


def validate_family(a, b, count):
    """End-to-end check of the machinery at desk scale.

    Enumerates admissible q on the imaginary side, certifies each, skips
    the thin degenerations where the two values fail to span a rank-2
    subgroup of K*/K*² (a value or the product is a rational square), and
    computes the exact 2-rank of the fibre class group. Every retained
    member must show 2-rank >= 2; a violation is a machinery bug, not a
    data point, and raises."""
    family = build_quad_family(a, b)
    strategy = "negative" if family.a * family.b > 0 else "positive"
    members = []
    skipped = []
    scanned = 0
    while len(members) < count:
        want = scanned + (count - len(members)) + 4
        qs = enumerate_admissible(family.profile, want, strategy)
        for q in qs[scanned:]:
            scanned += 1
            check = certify_member(family, q)
            if not check.certified:
                raise OracleError(
                    "machinery bug: admissible q = %s failed a square check" % q)
            kernels = tuple(_squarefree_kernel(x) for x in check.values)
            if 1 in kernels or kernels[0] == kernels[1]:
                skipped.append((q, "square-class degeneration"))
                continue
            kernel, disc, conductor = fibre_discriminant(family, q)
            if kernel > 0:
                raise OracleError(
                    "machinery bug: admissible q = %s gives a real fibre" % q)
            rank = class_group_2rank(disc)
            members.append(QuadMember(q, check.values, kernels, kernel, disc,
                                      conductor, rank))
            if len(members) == count:
                break
    ranks = [m.two_rank for m in members]
    minimum = min(ranks) if ranks else None
    mean = Fraction(sum(ranks), len(ranks)) if ranks else None
    if minimum is not None and minimum < 2:
        worst = min(members, key=lambda m: m.two_rank)
        raise OracleError(
            "machinery bug: certified q = %s has class-group 2-rank %d"
            % (worst.q, worst.two_rank))
    return OracleReport(family, strategy, tuple(members), tuple(skipped),
                        minimum, mean)
