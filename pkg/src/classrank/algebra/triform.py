"""Sparse homogeneous forms in three variables x, y, z over Q.

A TriForm is a dict from exponent triples (i, j, k) to nonzero Fraction
coefficients. Most routines assume (but do not require) homogeneity;
`degree` reports the common total degree and raises if the terms are mixed.
"""

from __future__ import annotations

from fractions import Fraction


def monomials_of_degree(d):
    """All exponent triples of total degree d in graded-lex order (x > y > z)."""
    out = []
    for i in range(d, -1, -1):
        for j in range(d - i, -1, -1):
            out.append((i, j, d - i - j))
    return out


class TriForm:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    t[e] = t.get(e, Fraction(0)) + c
                    if not t[e]:
                        del t[e]
        self.terms = t

    @staticmethod
    def zero():
        return TriForm()

    @staticmethod
    def monomial(i, j, k, c=1):
        return TriForm({(i, j, k): Fraction(c)})

    @staticmethod
    def variable(idx):
        e = [0, 0, 0]
        e[idx] = 1
        return TriForm({tuple(e): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, TriForm) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def degree(self):
        if not self.terms:
            return -1
        degs = {sum(e) for e in self.terms}
        if len(degs) != 1:
            raise ValueError("inhomogeneous form")
        return degs.pop()

    def __neg__(self):
        return TriForm({e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        f = TriForm()
        f.terms = out
        return f

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TriForm):
            out = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                    s = out.get(e, Fraction(0)) + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
            f = TriForm()
            f.terms = out
            return f
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return TriForm()
        return TriForm({e: cc * c for e, cc in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = TriForm({(0, 0, 0): Fraction(1)})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def partial(self, idx):
        out = {}
        for e, c in self.terms.items():
            if e[idx]:
                ne = list(e)
                ne[idx] -= 1
                out[tuple(ne)] = c * e[idx]
        f = TriForm()
        f.terms = out
        return f

    def __call__(self, x, y, z):
        """Evaluate; the point coordinates may be Fractions or field elements."""
        acc = None
        for e, c in sorted(self.terms.items(), reverse=True):
            term = x - x if hasattr(x, "__sub__") else Fraction(0)
            term = term + c
            for _ in range(e[0]):
                term = term * x
            for _ in range(e[1]):
                term = term * y
            for _ in range(e[2]):
                term = term * z
            acc = term if acc is None else acc + term
        if acc is None:
            return x - x
        return acc

    def substitute_linear(self, rows):
        """Apply the linear change of variables given by a 3x3 matrix of
        Fractions: new variables X_i with x_old_i = sum_j rows[i][j] * X_j."""
        new_vars = []
        for i in range(3):
            v = TriForm({(1, 0, 0): rows[i][0], (0, 1, 0): rows[i][1], (0, 0, 1): rows[i][2]})
            new_vars.append(v)
        acc = TriForm()
        for e, c in self.terms.items():
            term = TriForm({(0, 0, 0): c})
            for idx in range(3):
                for _ in range(e[idx]):
                    term = term * new_vars[idx]
            acc = acc + term
        return acc

    def coefficient_vector(self, d=None, monoms=None):
        """Coefficients against the degree-d graded-lex monomial list."""
        if monoms is None:
            if d is None:
                d = self.degree
                if d < 0:
                    raise ValueError("zero form needs an explicit degree")
            monoms = monomials_of_degree(d)
        return [self.terms.get(e, Fraction(0)) for e in monoms]

    @staticmethod
    def from_coefficient_vector(vec, d):
        monoms = monomials_of_degree(d)
        if len(vec) != len(monoms):
            raise ValueError("vector length mismatch")
        return TriForm({e: c for e, c in zip(monoms, vec)})

    def leading_monomial(self):
        """Largest exponent triple in graded-lex order (homogeneous forms)."""
        if not self.terms:
            raise ValueError("zero form")
        return max(self.terms)

    def content_cleared(self):
        """Integer-primitive scalar multiple with positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd

        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        nums = [int(c * den) for c in self.terms.values()]
        g = 0
        for n in nums:
            g = gcd(g, n)
        f = self.scale(Fraction(den, g))
        if f.terms[f.leading_monomial()] < 0:
            f = -f
        return f

    def dehomogenized(self, idx=2):
        """Set variable idx to 1; returns a dict (i, j) -> coeff in the others."""
        out = {}
        for e, c in self.terms.items():
            key = tuple(v for p, v in enumerate(e) if p != idx)
            out[key] = out.get(key, Fraction(0)) + c
        return {k: v for k, v in out.items() if v}

    def to_str(self, names=("x", "y", "z")):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mon = "*".join(
                n if p == 1 else "%s^%d" % (n, p)
                for n, p in zip(names, e)
                if p
            )
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append("%s*%s" % (c, mon))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return "TriForm(%s)" % (self.to_str(),)


def jacobian_determinant(f, g, h):
    """det of the 3x3 Jacobian of (f, g, h)."""
    m = [[F.partial(i) for i in range(3)] for F in (f, g, h)]
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
