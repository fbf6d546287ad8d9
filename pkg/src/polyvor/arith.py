# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Exact rational vectors and dense matrices.

Scalars are :py:class:`fractions.Fraction` instances, which are always kept in lowest terms with a
positive denominator, so equality is structural. Vectors are tuples of fractions.
"""
import logging
from fractions import Fraction
from typing import Any
from typing import Iterable
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr

from polyvor.customtypes import RationalVector
from polyvor.exceptions import DimensionMismatch
from polyvor.exceptions import SingularMatrix

log = logging.getLogger(__name__)


def vector(values: Iterable[Any]) -> RationalVector:
    """
    Build a rational vector from integers, fractions or exact strings.
    """
    return tuple(Fraction(value) for value in values)


def _check_same_length(left: Sequence[Any], right: Sequence[Any]) -> None:
    if len(left) != len(right):
        raise DimensionMismatch(f"Vectors of dimension {len(left)} and {len(right)} do not match")


def dot(left: Sequence[Fraction], right: Sequence[Fraction]) -> Fraction:
    """
    Exact inner product.
    """
    _check_same_length(left, right)
    return sum((a * b for a, b in zip(left, right)), Fraction(0))


def add(left: Sequence[Fraction], right: Sequence[Fraction]) -> RationalVector:
    _check_same_length(left, right)
    return tuple(a + b for a, b in zip(left, right))


def sub(left: Sequence[Fraction], right: Sequence[Fraction]) -> RationalVector:
    _check_same_length(left, right)
    return tuple(a - b for a, b in zip(left, right))


def scale(factor: Fraction, values: Sequence[Fraction]) -> RationalVector:
    return tuple(factor * value for value in values)


def neg(values: Sequence[Fraction]) -> RationalVector:
    return tuple(-value for value in values)


def is_zero(values: Sequence[Fraction]) -> bool:
    return all(value == 0 for value in values)


def _to_rows(value: Iterable[Iterable[Any]]) -> Tuple[RationalVector, ...]:
    return tuple(vector(row) for row in value)


@attr.s(frozen=True, kw_only=True)
class RationalMatrix:
    """
    Dense rectangular matrix of exact rationals.

    Keyword Arguments:
        rows:
            The matrix rows; every row must have the same length
    """

    rows: Tuple[RationalVector, ...] = attr.ib(converter=_to_rows)

    @rows.validator
    def _validate_rows(self, attribute: Any, value: Tuple[RationalVector, ...]) -> None:
        if not value or not value[0]:
            raise DimensionMismatch("A matrix needs at least one row and one column")
        width = len(value[0])
        if any(len(row) != width for row in value):
            raise DimensionMismatch("Matrix rows have different lengths")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]]) -> "RationalMatrix":
        return cls(rows=rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Any]]) -> "RationalMatrix":
        return cls(rows=list(zip(*columns)))

    @classmethod
    def identity(cls, size: int) -> "RationalMatrix":
        return cls(rows=[[int(i == j) for j in range(size)] for i in range(size)])

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def is_square(self) -> bool:
        nrows, ncols = self.shape
        return nrows == ncols

    def column(self, index: int) -> RationalVector:
        return tuple(row[index] for row in self.rows)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(rows=list(zip(*self.rows)))

    def apply(self, values: Sequence[Fraction]) -> RationalVector:
        """
        Return the matrix-vector product.
        """
        if len(values) != self.shape[1]:
            raise DimensionMismatch(
                f"Cannot apply a {self.shape[0]}x{self.shape[1]} matrix to a vector of "
                f"dimension {len(values)}"
            )
        return tuple(dot(row, values) for row in self.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"Cannot multiply {self.shape} by {other.shape}")
        columns = other.transpose().rows
        return RationalMatrix(rows=[[dot(row, col) for col in columns] for row in self.rows])

    def __str__(self) -> str:
        return "[{}]".format(
            ", ".join("[{}]".format(", ".join(str(value) for value in row)) for row in self.rows)
        )


def _height(value: Fraction) -> int:
    return abs(value.numerator) + value.denominator


@attr.s(frozen=True, kw_only=True)
class _Reduction:
    rank: int = attr.ib()
    columns: List[int] = attr.ib()
    pivots: List[Fraction] = attr.ib()
    sign: int = attr.ib()
    rows: List[List[Fraction]] = attr.ib()


def _reduce(rows: List[List[Fraction]], pivot_columns: int) -> _Reduction:
    """
    Gauss-Jordan elimination with full pivoting restricted to the first ``pivot_columns`` columns.

    Pivots are chosen among all remaining nonzero entries by smallest height, which keeps the
    coefficient growth of exact arithmetic in check. Column exchanges are logical, recorded in the
    returned column order.
    """
    nrows = len(rows)
    columns = list(range(pivot_columns))
    pivots: List[Fraction] = []
    sign = 1
    rank = 0
    for step in range(min(nrows, pivot_columns)):
        best: Optional[Tuple[int, int, int]] = None
        for ridx in range(step, nrows):
            row = rows[ridx]
            for cidx in range(step, pivot_columns):
                value = row[columns[cidx]]
                if value and (best is None or _height(value) < best[0]):
                    best = (_height(value), ridx, cidx)
        if best is None:
            break
        _, ridx, cidx = best
        if ridx != step:
            rows[step], rows[ridx] = rows[ridx], rows[step]
            sign = -sign
        if cidx != step:
            columns[step], columns[cidx] = columns[cidx], columns[step]
            sign = -sign
        pivot_column = columns[step]
        pivot = rows[step][pivot_column]
        pivots.append(pivot)
        pivot_row = [value / pivot for value in rows[step]]
        rows[step] = pivot_row
        for ridx in range(nrows):
            factor = rows[ridx][pivot_column]
            if ridx != step and factor:
                rows[ridx] = [a - factor * b for a, b in zip(rows[ridx], pivot_row)]
        rank += 1
    return _Reduction(rank=rank, columns=columns, pivots=pivots, sign=sign, rows=rows)


def solve_linear(matrix: RationalMatrix, rhs: Sequence[Fraction]) -> Optional[RationalVector]:
    """
    Solve ``matrix @ x == rhs`` exactly.

    Arguments:
        matrix:
            The coefficient matrix, square or overdetermined
        rhs:
            The right hand side

    Returns:
        The exact solution, or ``None`` when the system is inconsistent. For rank deficient
        consistent systems the particular solution with zero free variables is returned.
    """
    nrows, ncols = matrix.shape
    if len(rhs) != nrows:
        raise DimensionMismatch(
            f"Right hand side of dimension {len(rhs)} does not match {nrows} equations"
        )
    rows = [list(row) + [Fraction(value)] for row, value in zip(matrix.rows, rhs)]
    reduction = _reduce(rows, ncols)
    for row in reduction.rows[reduction.rank :]:
        if row[ncols] != 0:
            log.debug("Inconsistent system %s x = %s", matrix, tuple(rhs))
            return None
    solution = [Fraction(0)] * ncols
    for step in range(reduction.rank):
        solution[reduction.columns[step]] = reduction.rows[step][ncols]
    return tuple(solution)


def matrix_inverse(matrix: RationalMatrix) -> RationalMatrix:
    """
    Return the exact inverse of a square, full rank matrix.
    """
    if not matrix.is_square:
        raise DimensionMismatch(f"Cannot invert a non square {matrix.shape} matrix")
    size = matrix.shape[0]
    rows = [
        list(row) + [Fraction(int(i == j)) for j in range(size)]
        for i, row in enumerate(matrix.rows)
    ]
    reduction = _reduce(rows, size)
    if reduction.rank < size:
        raise SingularMatrix(f"Matrix {matrix} has rank {reduction.rank} < {size}")
    inverse: List[List[Fraction]] = [[] for _ in range(size)]
    for step in range(size):
        inverse[reduction.columns[step]] = reduction.rows[step][size:]
    return RationalMatrix(rows=inverse)


def determinant(matrix: RationalMatrix) -> Fraction:
    """
    Return the exact determinant of a square matrix.
    """
    if not matrix.is_square:
        raise DimensionMismatch(f"The determinant of a non square {matrix.shape} matrix is undefined")
    size = matrix.shape[0]
    reduction = _reduce([list(row) for row in matrix.rows], size)
    if reduction.rank < size:
        return Fraction(0)
    result = Fraction(reduction.sign)
    for pivot in reduction.pivots:
        result *= pivot
    return result


def rank(matrix: RationalMatrix) -> int:
    """
    Return the exact rank.
    """
    return _reduce([list(row) for row in matrix.rows], matrix.shape[1]).rank


def rank_of_vectors(vectors: Sequence[Sequence[Fraction]]) -> int:
    """
    Return the dimension of the linear span of ``vectors``; zero for an empty list.
    """
    if not vectors:
        return 0
    return rank(RationalMatrix(rows=vectors))
