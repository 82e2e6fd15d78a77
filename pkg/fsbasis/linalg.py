"""Exact linear algebra: ranks and kernels over QQ (sympy DomainMatrix) and a small GF(2) solver."""

from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence

from sympy import QQ, Matrix, Rational
from sympy.polys.matrices import DomainMatrix

from fsbasis.errors import InternalError

SparseVector = Dict[Hashable, Fraction]


def _qq(x: Fraction):
    return QQ(x.numerator, x.denominator)


def to_domain_matrix(rows: Sequence[SparseVector], columns: Optional[List[Hashable]] = None) -> DomainMatrix:
    if columns is None:
        seen = {}
        for row in rows:
            for key in row:
                seen.setdefault(key, len(seen))
        columns = list(seen)
    index = {key: k for k, key in enumerate(columns)}
    data = {}
    for i, row in enumerate(rows):
        entries = {index[key]: _qq(c) for key, c in row.items() if c != 0}
        if entries:
            data[i] = entries
    return DomainMatrix(data, (len(rows), len(columns)), QQ)


def rank(rows: Sequence[SparseVector]) -> int:
    nonzero = [r for r in rows if any(c != 0 for c in r.values())]
    if not nonzero:
        return 0
    return to_domain_matrix(nonzero).rank()


def kernel_dimension(vectors: Sequence[SparseVector]) -> int:
    """Dimension of the space of linear relations among the vectors."""
    return len(vectors) - rank(vectors)


def nullspace(columns: Sequence[SparseVector]) -> List[List[Fraction]]:
    """Basis of linear relations among the given vectors, as Fraction lists."""
    keys: Dict[Hashable, int] = {}
    for col in columns:
        for key in col:
            keys.setdefault(key, len(keys))
    if not keys:
        return [[Fraction(int(i == k)) for i in range(len(columns))] for k in range(len(columns))]
    matrix = Matrix(len(keys), len(columns), lambda i, j: 0)
    for j, col in enumerate(columns):
        for key, c in col.items():
            matrix[keys[key], j] = Rational(c.numerator, c.denominator)
    basis = []
    for vector in matrix.nullspace():
        basis.append([Fraction(int(v.p), int(v.q)) for v in vector])
    return basis


def solve_gf2(rows: List[List[int]], rhs: List[int], n_vars: int, free_value: int = 0) -> List[int]:
    """Solve A x = b over GF(2); free variables take free_value."""
    work = []
    for row, b in zip(rows, rhs):
        bits = 0
        for k, v in enumerate(row):
            if v % 2:
                bits |= 1 << k
        work.append([bits, b % 2])

    pivots: List[int] = []
    pivot_row = 0
    for col in range(n_vars):
        found = -1
        for r in range(pivot_row, len(work)):
            if (work[r][0] >> col) & 1:
                found = r
                break
        if found == -1:
            continue
        work[pivot_row], work[found] = work[found], work[pivot_row]
        for r in range(len(work)):
            if r != pivot_row and (work[r][0] >> col) & 1:
                work[r][0] ^= work[pivot_row][0]
                work[r][1] ^= work[pivot_row][1]
        pivots.append(col)
        pivot_row += 1

    for bits, b in work[pivot_row:]:
        if bits == 0 and b:
            raise InternalError("inconsistent GF(2) system")

    pivot_set = set(pivots)
    x = [0 if k in pivot_set else free_value % 2 for k in range(n_vars)]
    for r, col in enumerate(pivots):
        bits, b = work[r]
        acc = b
        for k in range(n_vars):
            if k != col and k not in pivot_set and (bits >> k) & 1:
                acc ^= x[k]
        x[col] = acc
    return x
