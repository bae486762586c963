"""Exact linear algebra over any field whose elements are falsy iff zero."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def rref(rows, ncols):
    """Reduced row echelon form.

    Returns (reduced rows with zero rows dropped, pivot column list).
    Input rows are not mutated.
    """
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = mat[r][c]
        mat[r] = [e / inv for e in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def kernel_basis(rows, ncols, one=Fraction(1)):
    """Basis of the right kernel, in reduced echelon form.

    Each basis vector has entry `one` at its free column and zeros at the
    other free columns; vectors are ordered by free column. This is the
    canonical parametrization read off the RREF, hence deterministic.
    """
    red, pivots = rref(rows, ncols)
    zero = one - one
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for fc in free:
        vec = [zero] * ncols
        vec[fc] = one
        for i, pc in enumerate(pivots):
            vec[pc] = -red[i][fc]
        basis.append(vec)
    return basis


@dataclass
class LinearSolution:
    """Outcome of an exact linear solve: consistency flag, one particular
    solution (None if inconsistent), and a kernel basis."""

    consistent: bool
    particular: list | None
    kernel: list


def solve_linear_system(rows, rhs, one=Fraction(1)):
    """Solve rows * x = rhs exactly. Returns a LinearSolution."""
    n = len(rows)
    if n == 0:
        return LinearSolution(True, [], [])
    ncols = len(rows[0])
    zero = one - one
    aug = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return LinearSolution(False, None, kernel_basis(rows, ncols, one))
    part = [zero] * ncols
    for i, pc in enumerate(pivots):
        part[pc] = red[i][ncols]
    return LinearSolution(True, part, kernel_basis(rows, ncols, one))


def det(rows, one=Fraction(1)):
    """Determinant over a field, by Gaussian elimination with exact division."""
    n = len(rows)
    mat = [list(r) for r in rows]
    zero = one - one
    sign = one
    acc = one
    for c in range(n):
        pr = None
        for i in range(c, n):
            if mat[i][c]:
                pr = i
                break
        if pr is None:
            return zero
        if pr != c:
            mat[c], mat[pr] = mat[pr], mat[c]
            sign = -sign
        piv = mat[c][c]
        acc = acc * piv
        for i in range(c + 1, n):
            if mat[i][c]:
                f = mat[i][c] / piv
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    return sign * acc


def det_bareiss(rows):
    """Fraction-free determinant (Bareiss) over an integral domain.

    Entries need *, -, exact // and truthiness; used for matrices of
    polynomials where field division is unavailable.
    """
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    mat = [list(r) for r in rows]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not mat[k][k]:
            pr = None
            for i in range(k + 1, n):
                if mat[i][k]:
                    pr = i
                    break
            if pr is None:
                return mat[k][k] - mat[k][k]
            mat[k], mat[pr] = mat[pr], mat[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]
                mat[i][j] = num if prev is None else num // prev
            mat[i][k] = mat[i][k] - mat[i][k]
        prev = mat[k][k]
    d = mat[n - 1][n - 1]
    return d if sign == 1 else -d
