# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Test ``polyvor.polynomials.MultiPoly`` and its numeric counterpart.
"""
from fractions import Fraction

import numpy as np
import pytest
from pytest_subtests import SubTests

from polyvor import polynomials
from polyvor.exceptions import DimensionMismatch
from polyvor.exceptions import PolynomialError
from polyvor.exceptions import ProblemFileError
from polyvor.exceptions import ZeroPolynomialDivision
from polyvor.polynomials import MultiPoly
from polyvor.polynomials import NumericPolynomial


def poly(text: str, nvars: int = 2) -> MultiPoly:
    return MultiPoly.parse(text, nvars)


def test_parse(subtests: SubTests) -> None:
    with subtests.test("aliases"):
        assert poly("y - x**2") == poly("x2 - x1**2")
    with subtests.test("terms"):
        parabola = poly("y - x**2")
        assert parabola.as_dict() == {(2, 0): -1, (0, 1): 1}
        assert parabola.degree == 2
        assert parabola.degree_in(1) == 1
        assert parabola.leading_coefficient == -1
        assert parabola.coefficient((0, 1)) == 1
        assert parabola.coefficient((1, 1)) == 0
    with subtests.test("rational coefficients"):
        assert poly("x/3 + 0.25").as_dict() == {(1, 0): Fraction(1, 3), (0, 0): Fraction(1, 4)}
    with subtests.test("three variables"):
        assert poly("z**2 - 1", 3).as_dict() == {(0, 0, 2): 1, (0, 0, 0): -1}
    with subtests.test("unknown symbol"):
        with pytest.raises(PolynomialError):
            poly("x + w")
    with subtests.test("not a polynomial"):
        with pytest.raises(PolynomialError):
            poly("1/x")
    with subtests.test("syntax error"):
        with pytest.raises(PolynomialError):
            poly("x +")
    with subtests.test("string form parses back"):
        quartic = poly("y - 2*x**2 + 2*x**4")
        assert MultiPoly.parse(str(quartic), 2) == quartic


def test_term_list(subtests: SubTests) -> None:
    parabola = poly("y - x**2")
    with subtests.test("layout"):
        assert parabola.to_term_list() == [
            {"coeff": "-1", "exponents": [2, 0]},
            {"coeff": "1", "exponents": [0, 1]},
        ]
    with subtests.test("from strings"):
        items = [{"coeff": "1/2", "exponents": [1, 0]}, {"coeff": "-3", "exponents": [0, 0]}]
        assert MultiPoly.from_term_list(items) == poly("x/2 - 3")
    with subtests.test("merged duplicates"):
        items = [{"coeff": "1", "exponents": [1, 0]}, {"coeff": "-1", "exponents": [1, 0]}]
        assert MultiPoly.from_term_list(items).is_zero
    with subtests.test("empty"):
        assert MultiPoly.from_term_list([], nvars=2) == MultiPoly.zero(2)
        with pytest.raises(PolynomialError):
            MultiPoly.from_term_list([])
    with subtests.test("float coefficients are refused"):
        with pytest.raises(ProblemFileError):
            MultiPoly.from_term_list([{"coeff": 0.1, "exponents": [1, 0]}])


def test_validation() -> None:
    with pytest.raises(DimensionMismatch):
        MultiPoly(nvars=0)
    with pytest.raises(DimensionMismatch):
        MultiPoly(nvars=2, terms={(1, 0, 0): 1})
    with pytest.raises(PolynomialError):
        MultiPoly(nvars=2, terms={(-1, 0): 1})


def test_arithmetic(subtests: SubTests) -> None:
    x = MultiPoly.variable(0, 2)
    y = MultiPoly.variable(1, 2)
    with subtests.test("product"):
        assert (x + 1) * (x - 1) == poly("x**2 - 1")
    with subtests.test("power"):
        assert (x + y) ** 2 == poly("x**2 + 2*x*y + y**2")
    with subtests.test("reflected"):
        assert 1 - x == poly("1 - x")
        assert 2 * y == poly("2*y")
    with subtests.test("scale"):
        assert poly("2*x + 4").scale("1/2") == poly("x + 2")
    with subtests.test("linear"):
        assert MultiPoly.linear([1, -2], constant=3) == poly("x - 2*y + 3")
    with subtests.test("variable count mismatch"):
        with pytest.raises(DimensionMismatch):
            x + MultiPoly.variable(0, 3)


def test_evaluate_and_derivatives(subtests: SubTests) -> None:
    parabola = poly("y - x**2")
    with subtests.test("on the curve"):
        assert parabola((Fraction(2), Fraction(4))) == 0
    with subtests.test("rational point"):
        assert polynomials.evaluate(parabola, (Fraction(1, 2), Fraction(3))) == Fraction(11, 4)
    with subtests.test("gradient"):
        assert polynomials.gradient(parabola) == [poly("-2*x"), poly("1")]
        assert polynomials.gradient_at(parabola, (Fraction(2), Fraction(4))) == (-4, 1)
    with subtests.test("wrong dimension"):
        with pytest.raises(DimensionMismatch):
            polynomials.evaluate(parabola, (Fraction(1),))


def test_division_and_gcd(subtests: SubTests) -> None:
    with subtests.test("exact"):
        assert polynomials.exact_divide(poly("x**2 - y**2"), poly("x - y")) == poly("x + y")
    with subtests.test("inexact"):
        assert polynomials.exact_divide(poly("x**2 + 1"), poly("x - 1")) is None
    with subtests.test("by zero"):
        with pytest.raises(ZeroPolynomialDivision):
            polynomials.exact_divide(poly("x"), MultiPoly.zero(2))
    with subtests.test("gcd"):
        assert polynomials.polynomial_gcd(poly("x**2 - 1"), poly("(x - 1)*y")) == poly("x - 1")


def test_normalize() -> None:
    assert polynomials.normalize(poly("x/2 - y/3")) == poly("3*x - 2*y")
    assert polynomials.normalize(poly("-2*x + 4")) == poly("x - 2")
    assert polynomials.normalize(MultiPoly.zero(2)).is_zero


def test_numeric_polynomial() -> None:
    numeric = NumericPolynomial.build(poly("y - x**2"))
    points = np.array([[2.0, 4.0], [0.0, 1.0]])
    np.testing.assert_allclose(numeric.value(points), [0.0, 1.0])
    np.testing.assert_allclose(numeric.gradient(points), [[-4.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(numeric.hessian(points)[0], [[-2.0, 0.0], [0.0, 0.0]])
    np.testing.assert_allclose(numeric.scaled_residual(points), [0.0, 0.5])
    assert polynomials.float_value(poly("x*y"), (0.5, 3.0)) == pytest.approx(1.5)
    assert NumericPolynomial.build(poly("y - x**2")) is numeric
