"""Arithmetic in Q[x]/(m(x)) for a monic irreducible m over Q.

Elements are coefficient tuples against the power basis 1, a, ..., a^(n-1).
Field elements are falsy iff zero, so they slot into the generic linear
algebra and polynomial code. Mixed arithmetic with Fraction and int works
via coercion into the field.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import det_bareiss
from .unipoly import UniPoly


class NumberField:
    __slots__ = ("minpoly", "degree", "_power_table")

    def __init__(self, minpoly: UniPoly):
        if not minpoly or minpoly.lc() != 1:
            raise ValueError("minimal polynomial must be monic")
        self.minpoly = minpoly
        self.degree = minpoly.degree
        # a^(n+k) mod minpoly for k = 0 .. n-2, so products reduce by
        # multiply-adds instead of a polynomial division each time
        n = self.degree
        table = []
        row = [-c for c in minpoly.coeffs[:n]]
        for _ in range(max(n - 1, 0)):
            table.append(tuple(row))
            top = row[n - 1]
            row = [Fraction(0)] + row[: n - 1]
            if top:
                row = [a - top * c for a, c in zip(row, minpoly.coeffs[:n])]
        self._power_table = tuple(table)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(("NumberField", self.minpoly.coeffs))

    def __call__(self, value):
        """Coerce a rational or coefficient sequence into the field."""
        if isinstance(value, NumberFieldElem):
            if value.field is not self and value.field != self:
                raise ValueError("element of a different field")
            return value
        if isinstance(value, (int, Fraction)):
            coeffs = [Fraction(value)] + [Fraction(0)] * (self.degree - 1)
            return NumberFieldElem(self, tuple(coeffs))
        coeffs = [Fraction(c) for c in value]
        if len(coeffs) > self.degree:
            raise ValueError("too many coefficients")
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        return NumberFieldElem(self, tuple(coeffs))

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def generator(self):
        if self.degree == 1:
            return self(-self.minpoly.coeffs[0])
        coeffs = [Fraction(0)] * self.degree
        coeffs[1] = Fraction(1)
        return NumberFieldElem(self, tuple(coeffs))

    def __repr__(self):
        return "NumberField(%s)" % (self.minpoly.to_str("a"),)


class NumberFieldElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, NumberFieldElem):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def is_zero(self):
        return not any(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __neg__(self):
        return NumberFieldElem(self.field, tuple(-c for c in self.coeffs))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return NumberFieldElem(self.field, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return NumberFieldElem(self.field, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = self.field.degree
        a, b = self.coeffs, o.coeffs
        raw = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        raw[i + j] += x * y
        out = raw[:n]
        table = self.field._power_table
        for k in range(n - 1):
            extra = raw[n + k]
            if extra:
                red = table[k]
                out = [c + extra * r for c, r in zip(out, red)]
        return NumberFieldElem(self.field, tuple(out))

    __rmul__ = __mul__

    def inverse(self):
        if not self:
            raise ZeroDivisionError("zero in number field")
        # extended Euclid: s*elem + t*minpoly = gcd = 1
        a = self.field.minpoly
        b = UniPoly(self.coeffs)
        s_prev, s_cur = UniPoly(), UniPoly((Fraction(1),))
        while b:
            q, r = a.divmod(b)
            a, b = b, r
            s_prev, s_cur = s_cur, s_prev - q * s_cur
        # a is the gcd, a nonzero constant (minpoly irreducible)
        if a.degree != 0:
            raise ValueError("minimal polynomial is not irreducible")
        inv = s_prev.scale(Fraction(1) / a.coeffs[0]) % self.field.minpoly
        coeffs = list(inv.coeffs) + [Fraction(0)] * (self.field.degree - len(inv.coeffs))
        return NumberFieldElem(self.field, tuple(coeffs))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.field(other) / self

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def rational_part(self):
        """The element as a Fraction when it lies in Q, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def multiplication_matrix(self):
        """Matrix of multiplication by self against the power basis (rows =
        images of basis vectors)."""
        n = self.field.degree
        rows = []
        cur = self
        gen = self.field.generator() if n > 1 else None
        for i in range(n):
            rows.append(list(cur.coeffs))
            if i + 1 < n:
                cur = cur * gen
        return rows

    def charpoly(self):
        """Characteristic polynomial of multiplication by self, a monic
        UniPoly over Q of degree [K : Q]."""
        n = self.field.degree
        m = self.multiplication_matrix()
        x = UniPoly((Fraction(0), Fraction(1)))
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                e = UniPoly((-m[i][j],))
                if i == j:
                    e = e + x
                row.append(e)
            entries.append(row)
        return det_bareiss(entries)

    def norm(self):
        cp = self.charpoly()
        n = self.field.degree
        c0 = cp[0]
        return c0 if n % 2 == 0 else -c0

    def trace(self):
        cp = self.charpoly()
        return -cp[self.field.degree - 1]

    def __repr__(self):
        return "NFElem(%s)" % (UniPoly(self.coeffs).to_str("a"),)
