"""Integer lattices in Hermite normal form, via sympy."""

from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from sympy import GF, ZZ, Matrix
from sympy.matrices.normalforms import hermite_normal_form
from sympy.polys.matrices import DomainMatrix

IntRows = tuple[tuple[int, ...], ...]


def hnf_of_vectors(vectors: Sequence[Sequence[int]]) -> IntRows:
    """
    Column-style Hermite normal form of the lattice spanned by ``vectors``.

    Returns the rows of the upper-triangular basis matrix W whose columns
    span the same Z-module as the input vectors.
    """
    vectors = [list(v) for v in vectors if any(v)]
    if not vectors:
        return ()
    columns = Matrix(vectors).T
    W = hermite_normal_form(columns)
    return tuple(tuple(int(W[i, j]) for j in range(W.cols)) for i in range(W.rows))


def scale_to_integers(vectors: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Clear denominators: returns integer vectors and the common denominator."""
    den = lcm(*(Fraction(x).denominator for v in vectors for x in v)) if vectors else 1
    return [[int(Fraction(x) * den) for x in v] for v in vectors], den


def is_full_rank(W: IntRows) -> bool:
    return bool(W) and len(W) == len(W[0])


def determinant(W: IntRows) -> int:
    det = 1
    for i in range(len(W)):
        det *= W[i][i]
    return det


def solve_upper(W: IntRows, target: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """Coordinates of ``target`` in the basis given by the columns of the triangular W."""
    size = len(W)
    if not is_full_rank(W):
        return None
    coeffs = [Fraction(0)] * size
    for i in reversed(range(size)):
        rest = Fraction(target[i]) - sum(W[i][j] * coeffs[j] for j in range(i + 1, size))
        coeffs[i] = rest / W[i][i]
    return coeffs


def contains(W: IntRows, target: Sequence[Fraction]) -> bool:
    coeffs = solve_upper(W, target)
    return coeffs is not None and all(c.denominator == 1 for c in coeffs)


def integer_rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[ZZ(int(x)) for x in v] for v in vectors]
    if not rows:
        return 0
    return DomainMatrix(rows, (len(rows), len(rows[0])), ZZ).rank()


def rank_mod_p(vectors: Sequence[Sequence[int]], p: int) -> int:
    """Rank of the integer vectors reduced modulo p."""
    field = GF(p)
    rows = [[field(int(x) % p) for x in v] for v in vectors]
    if not rows:
        return 0
    return DomainMatrix(rows, (len(rows), len(rows[0])), field).rank()
