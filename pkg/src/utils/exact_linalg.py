# src/utils/exact_linalg.py
"""
Exact linear algebra helpers on sympy DomainMatrix (ZZ / QQ).
Functions:
 - int_matrix(rows), rat_matrix(rows) -> DomainMatrix over ZZ / QQ
 - to_rows(m) -> list[list[Fraction]]
 - invert(m) -> m^-1 over QQ (SingularMatrix if det = 0)
 - determinant(m) -> int
 - is_positive_definite(m) -> bool (leading principal minors)
 - smith_normal_form(m) -> SmithForm with unimodular left / right transforms
Notes:
 - Integers are Python ints, rationals are fractions.Fraction at the API boundary.
 - Nothing here uses floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from src.errors import DimensionMismatch, SingularMatrix


# =========================================================
# CONVERSIONS
# =========================================================
def to_fraction(q) -> Fraction:
    """QQ / ZZ domain element (or int / Fraction) -> Fraction."""
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    return Fraction(int(q.numerator), int(q.denominator))


def to_qq(q):
    q = Fraction(q)
    return QQ(q.numerator, q.denominator)


def _shape_of(rows: Sequence[Sequence]) -> tuple[int, int]:
    n = len(rows)
    m = len(rows[0]) if n else 0
    for row in rows:
        if len(row) != m:
            raise DimensionMismatch("matrix rows have different lengths")
    return n, m


def int_matrix(rows: Iterable[Iterable[int]]) -> DomainMatrix:
    rows = [list(r) for r in rows]
    shape = _shape_of(rows)
    for row in rows:
        for x in row:
            if Fraction(x).denominator != 1:
                raise DimensionMismatch("non-integral entry in integer matrix", entry=str(x))
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], shape, ZZ)


def rat_matrix(rows: Iterable[Iterable]) -> DomainMatrix:
    rows = [list(r) for r in rows]
    shape = _shape_of(rows)
    return DomainMatrix([[to_qq(x) for x in row] for row in rows], shape, QQ)


def to_rows(m: DomainMatrix) -> list[list[Fraction]]:
    return [[to_fraction(x) for x in row] for row in m.to_list()]


def to_int_rows(m: DomainMatrix) -> list[list[int]]:
    out = []
    for row in to_rows(m):
        if any(x.denominator != 1 for x in row):
            raise DimensionMismatch("matrix has non-integral entries")
        out.append([int(x) for x in row])
    return out


def _require_square(m: DomainMatrix):
    rows, cols = m.shape
    if rows != cols:
        raise DimensionMismatch("square matrix required", shape=m.shape)


# =========================================================
# INVERSE / DETERMINANT
# =========================================================
def determinant(m: DomainMatrix) -> int | Fraction:
    _require_square(m)
    if m.shape[0] == 0:
        return 1
    det = to_fraction(m.det())
    return int(det) if det.denominator == 1 else det


def invert(m: DomainMatrix) -> DomainMatrix:
    _require_square(m)
    q = m.convert_to(QQ)
    if m.shape[0] and determinant(q) == 0:
        raise SingularMatrix("matrix is singular", shape=m.shape)
    return q.inv()


def is_positive_definite(m: DomainMatrix) -> bool:
    """Sylvester's criterion on a symmetric matrix."""
    _require_square(m)
    n = m.shape[0]
    for k in range(1, n + 1):
        idx = list(range(k))
        if determinant(m.extract(idx, idx)) <= 0:
            return False
    return True


def rank(m: DomainMatrix) -> int:
    if 0 in m.shape:
        return 0
    return m.convert_to(QQ).rank()


# =========================================================
# SMITH NORMAL FORM
# =========================================================
@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple[int, ...]
    left: DomainMatrix
    right: DomainMatrix
    shape: tuple[int, int]

    def invariant_factors(self) -> tuple[int, ...]:
        """Nontrivial part of the diagonal (entries != 1)."""
        return tuple(d for d in self.diagonal if d != 1)

    def diagonal_matrix(self) -> DomainMatrix:
        rows, cols = self.shape
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(self.diagonal):
            out[i][i] = d
        return int_matrix(out) if rows else DomainMatrix([], (0, cols), ZZ)


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(m: DomainMatrix) -> SmithForm:
    """
    Elementary-operation reduction with pivot-magnitude minimisation.
    Returns SmithForm with left * m * right == diag(diagonal), each
    diagonal entry dividing the next, all entries nonnegative.
    """
    rows, cols = m.shape
    a = to_int_rows(m) if rows and cols else [[0] * cols for _ in range(rows)]
    left = _eye(rows)
    right = _eye(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + q * y for x, y in zip(left[dst], left[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in right:
            row[dst] += q * row[src]

    def smallest(t, cells):
        best = None
        for i, j in cells:
            v = abs(a[i][j])
            if v and (best is None or v < abs(a[best[0]][best[1]])):
                best = (i, j)
        return best

    t = 0
    while t < min(rows, cols):
        pos = smallest(t, [(i, j) for i in range(t, rows) for j in range(t, cols)])
        if pos is None:
            break
        swap_rows(t, pos[0])
        swap_cols(t, pos[1])

        while True:
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))

            cross = [(i, t) for i in range(t, rows)] + [(t, j) for j in range(t + 1, cols)]
            if any(a[i][j] for i, j in cross if (i, j) != (t, t)):
                # remainders left, move the smallest one to the pivot
                i, j = smallest(t, cross)
                swap_rows(t, i)
                swap_cols(t, j)
                continue

            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        t += 1

    diagonal = tuple(a[i][i] for i in range(min(rows, cols)))
    return SmithForm(
        diagonal=diagonal,
        left=int_matrix(left) if rows else DomainMatrix([], (0, 0), ZZ),
        right=int_matrix(right) if cols else DomainMatrix([], (0, 0), ZZ),
        shape=(rows, cols),
    )


if __name__ == "__main__":
    cusp = int_matrix([[-3, 0, 1], [0, -2, 1], [1, 1, -1]])
    print("det(-E) =", determinant(-cusp))
    print("M =", to_rows(-invert(cusp)))
    sf = smith_normal_form(int_matrix([[2, 0], [0, 3]]))
    print("SNF diag =", sf.diagonal)
