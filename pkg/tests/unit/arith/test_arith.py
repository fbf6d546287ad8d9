# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Test ``polyvor.arith``.
"""
import random
from fractions import Fraction

import pytest
from pytest_subtests import SubTests

from polyvor import arith
from polyvor.arith import RationalMatrix
from polyvor.exceptions import DimensionMismatch
from polyvor.exceptions import SingularMatrix


def test_rationals_are_canonical() -> None:
    assert Fraction(2, 4) == Fraction(1, 2)
    assert Fraction(1, -2).denominator == 2
    assert arith.vector(["2/4", 3, "-1/3"]) == (Fraction(1, 2), Fraction(3), Fraction(-1, 3))


def test_solve_linear(subtests: SubTests) -> None:
    with subtests.test("identity"):
        assert arith.solve_linear(RationalMatrix.identity(2), arith.vector([3, -4])) == (3, -4)
    with subtests.test("vertex of the square"):
        matrix = RationalMatrix.from_rows([[1, 0], [0, 1]])
        assert arith.solve_linear(matrix, arith.vector([1, 1])) == (1, 1)
    with subtests.test("inconsistent"):
        matrix = RationalMatrix.from_rows([[1, 1], [2, 2]])
        assert arith.solve_linear(matrix, arith.vector([1, 0])) is None
    with subtests.test("overdetermined consistent"):
        matrix = RationalMatrix.from_rows([[1, 0], [0, 1], [1, 1]])
        assert arith.solve_linear(matrix, arith.vector([1, 2, 3])) == (1, 2)
    with subtests.test("dimension mismatch"):
        with pytest.raises(DimensionMismatch):
            arith.solve_linear(RationalMatrix.identity(2), arith.vector([1, 2, 3]))


def test_matrix_inverse(subtests: SubTests) -> None:
    with subtests.test("identity"):
        assert arith.matrix_inverse(RationalMatrix.identity(3)) == RationalMatrix.identity(3)
    with subtests.test("involution"):
        matrix = RationalMatrix.from_rows([[-1, 0], [0, 1]])
        assert arith.matrix_inverse(matrix) == matrix
    with subtests.test("singular"):
        with pytest.raises(SingularMatrix):
            arith.matrix_inverse(RationalMatrix.from_rows([[1, 2], [2, 4]]))
    with subtests.test("not square"):
        with pytest.raises(DimensionMismatch):
            arith.matrix_inverse(RationalMatrix.from_rows([[1, 2, 3], [2, 4, 5]]))


def test_inverse_property() -> None:
    rng = random.Random(20240501)
    checked = 0
    while checked < 25:
        size = rng.randint(1, 4)
        matrix = RationalMatrix.from_rows(
            [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(size)] for _ in range(size)]
        )
        if arith.determinant(matrix) == 0:
            with pytest.raises(SingularMatrix):
                arith.matrix_inverse(matrix)
            continue
        assert matrix @ arith.matrix_inverse(matrix) == RationalMatrix.identity(size)
        checked += 1


def test_determinant(subtests: SubTests) -> None:
    with subtests.test("two by two"):
        assert arith.determinant(RationalMatrix.from_rows([[1, 2], [3, 4]])) == -2
    with subtests.test("rational entries"):
        matrix = RationalMatrix.from_rows([["1/2", 0, 0], [0, "2/3", 0], [5, 7, 3]])
        assert arith.determinant(matrix) == 1
    with subtests.test("row swap"):
        assert arith.determinant(RationalMatrix.from_rows([[0, 1], [1, 0]])) == -1
    with subtests.test("singular"):
        assert arith.determinant(RationalMatrix.from_rows([[1, 2], [2, 4]])) == 0
    with subtests.test("not square"):
        with pytest.raises(DimensionMismatch):
            arith.determinant(RationalMatrix.from_rows([[1, 2, 3]]))


def test_determinant_is_multiplicative() -> None:
    rng = random.Random(7)
    for _ in range(20):
        size = rng.randint(1, 4)
        left, right = (
            RationalMatrix.from_rows(
                [[Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(size)] for _ in range(size)]
            )
            for _ in range(2)
        )
        assert arith.determinant(left @ right) == arith.determinant(left) * arith.determinant(right)


def test_rank() -> None:
    assert arith.rank(RationalMatrix.from_rows([[1, 2], [2, 4]])) == 1
    assert arith.rank(RationalMatrix.identity(3)) == 3
    assert arith.rank_of_vectors([]) == 0
    assert arith.rank_of_vectors([arith.vector([1, 1, 0]), arith.vector([-1, -1, 0])]) == 1


def test_vector_helpers() -> None:
    left = arith.vector([1, "1/2"])
    right = arith.vector([-2, 4])
    assert arith.dot(left, right) == 0
    assert arith.add(left, right) == (-1, Fraction(9, 2))
    assert arith.sub(left, right) == (3, Fraction(-7, 2))
    assert arith.scale(Fraction(2), left) == (2, 1)
    assert arith.neg(left) == (-1, Fraction(-1, 2))
    assert arith.is_zero(arith.vector([0, 0]))
    with pytest.raises(DimensionMismatch):
        arith.dot(left, arith.vector([1]))


def test_matrix_validation() -> None:
    with pytest.raises(DimensionMismatch):
        RationalMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(DimensionMismatch):
        RationalMatrix.from_rows([])
    matrix = RationalMatrix.from_columns([[1, 2], [3, 4]])
    assert matrix.rows == ((1, 3), (2, 4))
    assert matrix.transpose().rows == ((1, 2), (3, 4))
    assert matrix.apply(arith.vector([1, 1])) == (4, 6)
    assert str(RationalMatrix.from_rows([["1/2", 1]])) == "[[1/2, 1]]"
