"""Exact linear algebra over Q, Z and GF(p) on top of sympy's DomainMatrix.

Vectors and matrices enter and leave this module as plain sequences of ints or
Fractions; sympy domain elements never escape.
"""

import logging
from collections.abc import Sequence
from fractions import Fraction

from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

Number = int | Fraction
Rows = Sequence[Sequence[Number]]


class SizeCapExceededError(Exception):
    """Exception raised when a matrix would exceed the configured size cap."""


def _to_qq(value: Number) -> object:
    return QQ(value.numerator, value.denominator)


def _from_sympy(value: object) -> Fraction:
    return Fraction(int(value.p), int(value.q))  # type: ignore[attr-defined]


def _domain_matrix(rows: Rows, width: int) -> DomainMatrix:
    return DomainMatrix(
        [[_to_qq(entry) for entry in row] for row in rows], (len(rows), width), QQ
    )


def _width(rows: Rows, width: int | None) -> int:
    if width is not None:
        return width
    if not rows:
        no_width_message = "Cannot infer the width of an empty matrix"
        raise ValueError(no_width_message)
    return len(rows[0])


def rank(rows: Rows, width: int | None = None) -> int:
    if not rows:
        return 0
    return int(_domain_matrix(rows, _width(rows, width)).rank())


def rank_mod_p(rows: Sequence[Sequence[int]], prime: int) -> int:
    if not rows:
        return 0
    field = GF(prime)
    matrix = DomainMatrix(
        [[field(entry % prime) for entry in row] for row in rows],
        (len(rows), len(rows[0])),
        field,
    )
    return int(matrix.rank())


def in_span(vector: Sequence[Number], rows: Rows) -> bool:
    if not any(vector):
        return True
    if not rows:
        return False
    return rank([*rows, vector]) == rank(rows)


def solve(rows: Rows, rhs: Sequence[Number], width: int) -> list[Fraction] | None:
    """Return one rational solution x of rows . x = rhs, or None if there is none.

    Free variables are set to zero.
    """
    augmented = [[*row, value] for row, value in zip(rows, rhs, strict=True)]
    reduced, pivots = _domain_matrix(augmented, width + 1).rref()
    if width in pivots:
        return None
    entries = reduced.to_Matrix()
    solution = [Fraction(0)] * width
    for row_index, column in enumerate(pivots):
        solution[column] = _from_sympy(entries[row_index, width])
    return solution


def determinant(rows: Rows) -> Fraction:
    size = len(rows)
    if size == 0:
        return Fraction(1)
    return _from_sympy(QQ.to_sympy(_domain_matrix(rows, size).det()))


def inverse(rows: Rows) -> list[list[Fraction]]:
    size = len(rows)
    inverted = _domain_matrix(rows, size).inv().to_Matrix()
    return [[_from_sympy(inverted[i, j]) for j in range(size)] for i in range(size)]


def has_unit_invariant_factors(rows: Sequence[Sequence[int]]) -> bool:
    """Whether the integer row vectors extend to a basis of the ambient lattice."""
    if not rows:
        return True
    if rank(rows) != len(rows):
        return False
    factors = invariant_factors(Matrix(rows), domain=ZZ)
    nonzero = [int(factor) for factor in factors if factor != 0]
    return len(nonzero) == len(rows) and all(abs(factor) == 1 for factor in nonzero)


def check_size(row_count: int, width: int, cap: int) -> None:
    if row_count * width > cap:
        size_cap_message = (
            f"Matrix of {row_count} x {width} entries exceeds the size cap of {cap}; "
            "raise BERGMANKIT_SIZE_CAP to allow it"
        )
        raise SizeCapExceededError(size_cap_message)
