"""Dense univariate polynomials over an exact field.

Coefficients are stored low to high with no trailing zeros. The zero
polynomial is the empty tuple. Coefficients may be Fraction or
NumberFieldElem (anything with exact field ops, falsy iff zero).
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import det, det_bareiss


def _trim(coeffs):
    c = list(coeffs)
    while c and not c[-1]:
        c.pop()
    return tuple(c)


class UniPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _trim(coeffs)

    @staticmethod
    def constant(c):
        return UniPoly((c,))

    @staticmethod
    def x(one=Fraction(1)):
        return UniPoly((one - one, one))

    @staticmethod
    def from_ints(ints):
        return UniPoly(tuple(Fraction(i) for i in ints))

    @property
    def degree(self):
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, i):
        if i < len(self.coeffs):
            return self.coeffs[i]
        if self.coeffs:
            z = self.coeffs[0]
            return z - z
        return Fraction(0)

    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __neg__(self):
        return UniPoly(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return UniPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return UniPoly()
            z = a[0] - a[0]
            out = [z] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a):
                if not ca:
                    continue
                for j, cb in enumerate(b):
                    if cb:
                        out[i + j] = out[i + j] + ca * cb
            return UniPoly(out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        return UniPoly(tuple(a * c for a in self.coeffs))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        if not self.coeffs:
            if n == 0:
                raise ValueError("0^0 with no field context")
            return UniPoly()
        one = self.coeffs[-1] / self.coeffs[-1]
        result = UniPoly((one,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other):
        """Exact (quotient, remainder) with field division by other's lc."""
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly(), self
        z = other.coeffs[-1] - other.coeffs[-1]
        quo = [z] * (dq + 1)
        inv_lc = (other.coeffs[-1] / other.coeffs[-1]) / other.coeffs[-1]
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] * inv_lc
            quo[k] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * oc
        return UniPoly(quo), UniPoly(rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        """Exact division; raises if the remainder is nonzero (Bareiss use)."""
        q, r = self.divmod(other)
        if r:
            raise ValueError("inexact polynomial division")
        return q

    def monic(self):
        if not self.coeffs:
            return self
        inv = (self.coeffs[-1] / self.coeffs[-1]) / self.coeffs[-1]
        return self.scale(inv)

    def derivative(self):
        if len(self.coeffs) <= 1:
            return UniPoly()
        out = []
        for i in range(1, len(self.coeffs)):
            c = self.coeffs[i]
            acc = c
            for _ in range(i - 1):
                acc = acc + c
            out.append(acc)
        return UniPoly(out)

    def __call__(self, x):
        if not self.coeffs:
            return x - x
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def compose(self, g):
        """self(g) for a polynomial g."""
        if not self.coeffs:
            return UniPoly()
        acc = UniPoly((self.coeffs[-1],))
        for c in reversed(self.coeffs[:-1]):
            acc = acc * g + UniPoly((c,))
        return acc

    def shift(self, a):
        """self(x + a)."""
        one = a / a if a else None
        if one is None:
            return self
        return self.compose(UniPoly((a, one)))

    def low_order(self):
        """Order of vanishing at 0 (+inf convention: returns None for zero)."""
        if not self.coeffs:
            return None
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def shifted_down(self, k):
        """Divide by x^k exactly."""
        if k == 0:
            return self
        if any(self.coeffs[:k]):
            raise ValueError("not divisible by x^%d" % k)
        return UniPoly(self.coeffs[k:])

    def reversed_coeffs(self, n=None):
        """x^n * self(1/x) as a polynomial, n defaulting to the degree."""
        if n is None:
            n = self.degree
        if n < self.degree:
            raise ValueError("reversal order below degree")
        if not self.coeffs:
            return UniPoly()
        z = self.coeffs[0] - self.coeffs[0]
        out = [z] * (n + 1)
        for i, c in enumerate(self.coeffs):
            out[n - i] = c
        return UniPoly(out)

    def truncated(self, n):
        """Coefficients below x^n only."""
        return UniPoly(self.coeffs[:n])

    def gcd(self, other):
        """Monic gcd by the Euclidean algorithm."""
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic() if a else a

    def squarefree_part(self):
        d = self.derivative()
        if not d:
            return self.monic()
        g = self.gcd(d)
        return (self // g).monic()

    def resultant(self, other):
        """Sylvester resultant over the coefficient field.

        Field Gaussian elimination, not Bareiss: Fraction floordiv is floor
        division, so the fraction-free recurrence would silently corrupt
        rational entries.
        """
        m, n = self.degree, other.degree
        if m < 0 or n < 0:
            c = self.coeffs[0] if self.coeffs else other.coeffs[0] if other.coeffs else Fraction(0)
            return c - c
        if m == 0:
            return self.coeffs[0] ** n
        if n == 0:
            return other.coeffs[0] ** m
        one = self.coeffs[-1] / self.coeffs[-1]
        z = one - one
        size = m + n
        rows = []
        for i in range(n):
            row = [z] * size
            for j, c in enumerate(reversed(self.coeffs)):
                row[i + j] = c
            rows.append(row)
        for i in range(m):
            row = [z] * size
            for j, c in enumerate(reversed(other.coeffs)):
                row[i + j] = c
            rows.append(row)
        return det(rows, one)

    def discriminant(self):
        """disc(f) = (-1)^(m(m-1)/2) Res(f, f') / lc(f)."""
        m = self.degree
        if m < 1:
            raise ValueError("discriminant needs degree >= 1")
        res = self.resultant(self.derivative())
        sign = -1 if (m * (m - 1) // 2) % 2 else 1
        d = res / self.lc()
        return d if sign == 1 else -d

    def sqrt(self):
        """Exact square root of a perfect-square polynomial, or None."""
        if not self.coeffs:
            return self
        if self.degree % 2:
            return None
        # work with the monic part; the leading coefficient needs its own root
        lc = self.lc()
        one = lc / lc
        half = self.degree // 2
        g = [one - one] * (half + 1)
        g[half] = one
        f = self.scale(one / lc)
        # undetermined coefficients from the top down
        for k in range(half - 1, -1, -1):
            # match coefficient of x^(half + k); the unknown enters as 2*g[k]
            idx = half + k
            acc = f[idx]
            for i in range(k + 1, half + 1):
                j = idx - i
                if 0 <= j <= half and j > k:
                    acc = acc - g[i] * g[j]
            two = one + one
            g[k] = acc / two
        cand = UniPoly(g)
        sq = cand * cand
        # fix the scalar: self = lc * monic-square requires lc to be a square
        # in the field; callers use this over Q where they handle the constant.
        if sq.scale(lc) == self:
            return cand.scale_sqrt_of(lc)
        return None

    def scale_sqrt_of(self, lc):
        # only rational use: lc must be a square of a rational
        if isinstance(lc, Fraction):
            from math import isqrt

            pn, pd = lc.numerator, lc.denominator
            if pn < 0:
                return None
            rn, rd = isqrt(pn), isqrt(pd)
            if rn * rn != pn or rd * rd != pd:
                return None
            return self.scale(Fraction(rn, rd))
        return None

    def to_str(self, var="t"):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                term = str(c)
            else:
                xs = var if i == 1 else "%s^%d" % (var, i)
                if c == 1:
                    term = xs
                elif c == -1:
                    term = "-" + xs
                else:
                    term = "%s*%s" % (c, xs)
            parts.append(term)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return "UniPoly(%s)" % (self.to_str(),)


def resultant_in_w(f_coeffs, g_coeffs):
    """Resultant in the outer variable of two polynomials whose coefficients
    are UniPoly in an inner variable (e.g. Res_W of bivariate polys in t, W).

    f_coeffs, g_coeffs: sequences of UniPoly, low to high in the outer
    variable. Returns a UniPoly in the inner variable.
    """
    f = [c for c in f_coeffs]
    g = [c for c in g_coeffs]
    while f and not f[-1]:
        f.pop()
    while g and not g[-1]:
        g.pop()
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return UniPoly()
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    z = UniPoly()
    size = m + n
    rows = []
    for i in range(n):
        row = [z] * size
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [z] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    return det_bareiss(rows)
