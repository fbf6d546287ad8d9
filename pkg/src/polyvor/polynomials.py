# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Multivariate polynomials over the rationals, affine line substitution and Sylvester resultants.

:py:class:`MultiPoly` stores its terms canonically so equality is structural; arithmetic is
delegated to :py:class:`sympy.Poly` over ``QQ``. A :py:class:`UniPolyOverU` is a polynomial in the
line parameter ``lambda`` whose coefficients are polynomials in ``u``, as produced by
:py:func:`substitute_line`.
"""
import functools
import logging
import math
from fractions import Fraction
from typing import Any
from typing import Dict
from typing import Iterable
from typing import List
from typing import Mapping
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import attr
import numpy as np
import sympy
from sympy.polys.polyerrors import BasePolynomialError

from polyvor.customtypes import RationalVector
from polyvor.exceptions import ConstantInLambda
from polyvor.exceptions import DimensionMismatch
from polyvor.exceptions import PolynomialError
from polyvor.exceptions import ZeroPolynomialDivision
from polyvor.utils import format_rational
from polyvor.utils import to_rational

log = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Terms = Tuple[Tuple[Exponents, Fraction], ...]

LAMBDA = sympy.Symbol("lambda")


@functools.lru_cache(maxsize=None)
def variables(count: int, prefix: str = "x") -> Tuple[sympy.Symbol, ...]:
    """
    Return the symbols ``x1, ..., xn`` (or with another prefix).
    """
    return tuple(sympy.Symbol(f"{prefix}{idx}") for idx in range(1, count + 1))


def _grlex_key(exponents: Exponents) -> Tuple[int, Exponents]:
    return sum(exponents), exponents


def _canonical_terms(value: Union[Mapping[Exponents, Any], Iterable[Tuple[Exponents, Any]]]) -> Terms:
    items = value.items() if isinstance(value, Mapping) else value
    merged: Dict[Exponents, Fraction] = {}
    for exponents, coeff in items:
        key = tuple(int(e) for e in exponents)
        merged[key] = merged.get(key, Fraction(0)) + Fraction(coeff)
    return tuple(
        sorted(
            ((key, coeff) for key, coeff in merged.items() if coeff != 0),
            key=lambda item: _grlex_key(item[0]),
            reverse=True,
        )
    )


def _sympy_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value: Any) -> Fraction:
    try:
        value = sympy.Rational(value)
    except (TypeError, ValueError) as exc:
        raise PolynomialError(f"Coefficient {value!r} is not rational") from exc
    return Fraction(int(value.p), int(value.q))


@attr.s(frozen=True, kw_only=True)
class MultiPoly:
    """
    A polynomial in ``nvars`` variables with rational coefficients.

    Keyword Arguments:
        nvars:
            Number of variables
        terms:
            Mapping, or pairs, of exponent vector to coefficient. Zero coefficients are dropped and
            terms are kept in descending graded lexicographic order.
    """

    nvars: int = attr.ib()
    terms: Terms = attr.ib(converter=_canonical_terms, factory=tuple)

    @nvars.validator
    def _validate_nvars(self, attribute: Any, value: int) -> None:
        if value < 1:
            raise DimensionMismatch("A polynomial needs at least one variable")

    @terms.validator
    def _validate_terms(self, attribute: Any, value: Terms) -> None:
        for exponents, _ in value:
            if len(exponents) != self.nvars:
                raise DimensionMismatch(
                    f"Exponent vector {exponents} does not match {self.nvars} variables"
                )
            if any(e < 0 for e in exponents):
                raise PolynomialError(f"Negative exponent in {exponents}")

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars=nvars)

    @classmethod
    def constant(cls, value: Any, nvars: int) -> "MultiPoly":
        return cls(nvars=nvars, terms={(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "MultiPoly":
        """
        Return the coordinate polynomial ``x_{index + 1}``.
        """
        return cls(nvars=nvars, terms={tuple(int(i == index) for i in range(nvars)): 1})

    @classmethod
    def linear(cls, coefficients: Sequence[Any], constant: Any = 0) -> "MultiPoly":
        """
        Return ``sum(c_i x_i) + constant``.
        """
        nvars = len(coefficients)
        terms: List[Tuple[Exponents, Any]] = [
            (tuple(int(i == idx) for i in range(nvars)), coeff)
            for idx, coeff in enumerate(coefficients)
        ]
        terms.append(((0,) * nvars, constant))
        return cls(nvars=nvars, terms=terms)

    @classmethod
    def from_sympy(cls, value: Any, gens: Optional[Sequence[sympy.Symbol]] = None) -> "MultiPoly":
        """
        Build a polynomial from a sympy ``Poly`` or expression.

        For expressions ``gens`` is required and fixes the variable order.
        """
        if not isinstance(value, sympy.Poly):
            if gens is None:
                raise PolynomialError("Generators are required to convert a sympy expression")
            value = sympy.Poly(value, *gens)
        return cls(
            nvars=len(value.gens),
            terms=[(monom, _fraction(coeff)) for monom, coeff in value.terms() if coeff != 0],
        )

    @classmethod
    def parse(cls, text: str, nvars: int, prefix: str = "x") -> "MultiPoly":
        """
        Parse an expression in the variables ``x1..xn``; ``x``, ``y`` and ``z`` are accepted as
        aliases for the first three.
        """
        gens = variables(nvars, prefix)
        local: Dict[str, Any] = {str(gen): gen for gen in gens}
        for alias, gen in zip("xyz", gens):
            local.setdefault(alias, gen)
        try:
            expr = sympy.sympify(text, locals=local, rational=True)
            poly = sympy.Poly(expr, *gens, domain=sympy.QQ)
        except (sympy.SympifyError, BasePolynomialError, TypeError, ValueError) as exc:
            raise PolynomialError(f"Cannot parse {text!r} as a polynomial in {gens}: {exc}") from exc
        return cls.from_sympy(poly)

    @classmethod
    def from_term_list(cls, items: Sequence[Mapping[str, Any]], nvars: Optional[int] = None) -> "MultiPoly":
        """
        Build a polynomial from ``[{"coeff": "p/q", "exponents": [...]}, ...]``.
        """
        if nvars is None:
            if not items:
                raise PolynomialError("Cannot infer the number of variables of an empty term list")
            nvars = len(items[0]["exponents"])
        return cls(
            nvars=nvars,
            terms=[(tuple(item["exponents"]), to_rational(item["coeff"])) for item in items],
        )

    def to_term_list(self) -> List[Dict[str, Any]]:
        return [
            {"coeff": format_rational(coeff), "exponents": list(exponents)}
            for exponents, coeff in self.terms
        ]

    def as_poly(self, prefix: str = "x") -> sympy.Poly:
        gens = variables(self.nvars, prefix)
        rep = {exponents: _sympy_rational(coeff) for exponents, coeff in self.terms}
        if not rep:
            rep = {(0,) * self.nvars: sympy.Integer(0)}
        return sympy.Poly.from_dict(rep, *gens, domain=sympy.QQ)

    def as_expr(self, prefix: str = "x") -> sympy.Expr:
        return self.as_poly(prefix).as_expr()

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    @property
    def degree(self) -> int:
        """
        Total degree; ``-1`` for the zero polynomial.
        """
        if not self.terms:
            return -1
        return max(sum(exponents) for exponents, _ in self.terms)

    def degree_in(self, index: int) -> int:
        if not self.terms:
            return -1
        return max(exponents[index] for exponents, _ in self.terms)

    @property
    def leading_coefficient(self) -> Fraction:
        """
        Coefficient of the leading term in graded lexicographic order.
        """
        if not self.terms:
            return Fraction(0)
        return self.terms[0][1]

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        key = tuple(exponents)
        for term, coeff in self.terms:
            if term == key:
                return coeff
        return Fraction(0)

    def as_dict(self) -> Dict[Exponents, Fraction]:
        return dict(self.terms)

    def __call__(self, point: Sequence[Fraction]) -> Fraction:
        return evaluate(self, point)

    def _coerce(self, other: Any) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(
                    f"Polynomials in {self.nvars} and {other.nvars} variables cannot be combined"
                )
            return other
        return MultiPoly.constant(to_rational(other), self.nvars)

    def __add__(self, other: Any) -> "MultiPoly":
        other = self._coerce(other)
        return MultiPoly(nvars=self.nvars, terms=list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(nvars=self.nvars, terms=[(e, -c) for e, c in self.terms])

    def __sub__(self, other: Any) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "MultiPoly":
        other = self._coerce(other)
        return MultiPoly.from_sympy(self.as_poly() * other.as_poly())

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        return MultiPoly.from_sympy(self.as_poly() ** exponent)

    def scale(self, factor: Any) -> "MultiPoly":
        factor = to_rational(factor)
        return MultiPoly(nvars=self.nvars, terms=[(e, c * factor) for e, c in self.terms])

    def to_string(self, prefix: str = "x") -> str:
        return str(self.as_expr(prefix))

    def __str__(self) -> str:
        return self.to_string()


def evaluate(poly: MultiPoly, point: Sequence[Fraction]) -> Fraction:
    """
    Evaluate ``poly`` exactly at a rational point.
    """
    if len(point) != poly.nvars:
        raise DimensionMismatch(
            f"Point of dimension {len(point)} for a polynomial in {poly.nvars} variables"
        )
    point = [Fraction(value) for value in point]
    total = Fraction(0)
    for exponents, coeff in poly.terms:
        term = coeff
        for value, power in zip(point, exponents):
            if power:
                term *= value**power
        total += term
    return total


def derivative(poly: MultiPoly, index: int) -> MultiPoly:
    """
    Return the partial derivative with respect to variable ``index``.
    """
    terms = []
    for exponents, coeff in poly.terms:
        power = exponents[index]
        if power:
            lowered = exponents[:index] + (power - 1,) + exponents[index + 1 :]
            terms.append((lowered, coeff * power))
    return MultiPoly(nvars=poly.nvars, terms=terms)


def gradient(poly: MultiPoly) -> List[MultiPoly]:
    """
    Return the list of partial derivatives.
    """
    return [derivative(poly, idx) for idx in range(poly.nvars)]


def gradient_at(poly: MultiPoly, point: Sequence[Fraction]) -> RationalVector:
    return tuple(evaluate(item, point) for item in gradient(poly))


def _strip(coefficients: Sequence[MultiPoly]) -> Tuple[MultiPoly, ...]:
    coefficients = list(coefficients)
    while coefficients and coefficients[-1].is_zero:
        coefficients.pop()
    return tuple(coefficients)


@attr.s(frozen=True, kw_only=True)
class UniPolyOverU:
    """
    A polynomial in ``lambda`` with coefficients in ``u``.

    Keyword Arguments:
        nvars:
            Number of ``u`` variables
        coefficients:
            ``coefficients[i]`` is the coefficient of ``lambda ** i``. Trailing zero coefficients
            are dropped, so the leading coefficient is never zero.
    """

    nvars: int = attr.ib()
    coefficients: Tuple[MultiPoly, ...] = attr.ib(converter=_strip)

    @coefficients.validator
    def _validate_coefficients(self, attribute: Any, value: Tuple[MultiPoly, ...]) -> None:
        if any(item.nvars != self.nvars for item in value):
            raise DimensionMismatch(f"Coefficients must be polynomials in {self.nvars} variables")

    @property
    def degree(self) -> int:
        """
        Degree in ``lambda``; ``-1`` for the zero polynomial.
        """
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading_coefficient(self) -> MultiPoly:
        if not self.coefficients:
            return MultiPoly.zero(self.nvars)
        return self.coefficients[-1]

    def coefficient(self, power: int) -> MultiPoly:
        if 0 <= power < len(self.coefficients):
            return self.coefficients[power]
        return MultiPoly.zero(self.nvars)

    def coefficient_degrees(self) -> List[int]:
        """
        Total ``u`` degree of each coefficient, indexed by ``lambda`` power.
        """
        return [item.degree for item in self.coefficients]

    def specialize(self, point: Sequence[Fraction]) -> List[Fraction]:
        """
        Return the univariate coefficients obtained by fixing ``u``.
        """
        return [evaluate(item, point) for item in self.coefficients]

    def evaluate(self, point: Sequence[Fraction], parameter: Fraction) -> Fraction:
        total = Fraction(0)
        for power, value in enumerate(self.specialize(point)):
            total += value * Fraction(parameter) ** power
        return total

    def as_expr(self) -> sympy.Expr:
        return sympy.Add(*(item.as_expr("u") * LAMBDA**power for power, item in enumerate(self.coefficients)))

    def __str__(self) -> str:
        return str(self.as_expr())


def substitute_line(poly: MultiPoly, direction: Sequence[Fraction]) -> UniPolyOverU:
    """
    Return ``g(u, lambda) = poly(u + direction * lambda)`` expanded in powers of ``lambda``.

    The coefficient of ``lambda ** 0`` is ``poly(u)``.
    """
    if len(direction) != poly.nvars:
        raise DimensionMismatch(
            f"Direction of dimension {len(direction)} for a polynomial in {poly.nvars} variables"
        )
    xs = variables(poly.nvars, "x")
    us = variables(poly.nvars, "u")
    substitution = {
        x: u + _sympy_rational(Fraction(d)) * LAMBDA for x, u, d in zip(xs, us, direction)
    }
    expr = poly.as_expr("x").xreplace(substitution)
    expanded = sympy.Poly(expr, LAMBDA, *us, domain=sympy.QQ)
    buckets: Dict[int, List[Tuple[Exponents, Fraction]]] = {}
    for monom, coeff in expanded.terms():
        buckets.setdefault(monom[0], []).append((tuple(monom[1:]), _fraction(coeff)))
    degree = max(buckets) if buckets else 0
    return UniPolyOverU(
        nvars=poly.nvars,
        coefficients=[
            MultiPoly(nvars=poly.nvars, terms=buckets.get(power, [])) for power in range(degree + 1)
        ],
    )


def sylvester_matrix(first: UniPolyOverU, second: UniPolyOverU) -> List[List[MultiPoly]]:
    """
    Return the Sylvester matrix of two polynomials in ``lambda``.

    With ``m = deg(first)`` and ``n = deg(second)`` the matrix is ``(m + n) x (m + n)``; row ``i < n``
    holds the coefficients of ``first`` from the leading one, shifted ``i`` columns to the right,
    and the last ``m`` rows hold those of ``second``.
    """
    if first.nvars != second.nvars:
        raise DimensionMismatch("Resultant inputs have coefficients in different variable counts")
    m, n = first.degree, second.degree
    size = m + n
    zero = MultiPoly.zero(first.nvars)
    matrix = [[zero] * size for _ in range(size)]
    for shift in range(n):
        for offset, coeff in enumerate(reversed(first.coefficients)):
            matrix[shift][shift + offset] = coeff
    for shift in range(m):
        for offset, coeff in enumerate(reversed(second.coefficients)):
            matrix[n + shift][shift + offset] = coeff
    return matrix


def bareiss_determinant(matrix: Sequence[Sequence[MultiPoly]], nvars: int) -> MultiPoly:
    """
    Fraction free Bareiss elimination on a square matrix of polynomials.

    Every division is exact, so intermediate entries stay polynomials.
    """
    size = len(matrix)
    if size == 0:
        return MultiPoly.constant(1, nvars)
    rows = [[entry.as_poly("u") for entry in row] for row in matrix]
    sign = 1
    previous = sympy.Poly(1, *variables(nvars, "u"), domain=sympy.QQ)
    for k in range(size - 1):
        if rows[k][k].is_zero:
            for swap in range(k + 1, size):
                if not rows[swap][k].is_zero:
                    rows[k], rows[swap] = rows[swap], rows[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.zero(nvars)
        pivot = rows[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]).exquo(previous)
            rows[i][k] = rows[i][k] * 0
        previous = pivot
    result = MultiPoly.from_sympy(rows[size - 1][size - 1])
    return -result if sign < 0 else result


def sylvester_resultant(first: UniPolyOverU, second: UniPolyOverU) -> MultiPoly:
    """
    Return the resultant in ``lambda`` of two polynomials with coefficients in ``u``.

    Raises:
        ConstantInLambda: neither input depends on ``lambda``
    """
    if first.degree <= 0 and second.degree <= 0:
        raise ConstantInLambda("Both resultant inputs are constant in lambda")
    if first.is_zero or second.is_zero:
        return MultiPoly.zero(first.nvars)
    matrix = sylvester_matrix(first, second)
    log.debug(
        "Computing a %dx%d Sylvester determinant in %d variables",
        len(matrix),
        len(matrix),
        first.nvars,
    )
    return bareiss_determinant(matrix, first.nvars)


def exact_divide(numerator: MultiPoly, denominator: MultiPoly) -> Optional[MultiPoly]:
    """
    Return ``r`` with ``numerator == denominator * r``, or ``None`` when the division is not exact.
    """
    if denominator.is_zero:
        raise ZeroPolynomialDivision("Division by the zero polynomial")
    if numerator.nvars != denominator.nvars:
        raise DimensionMismatch("Polynomials in different variable counts")
    quotient, remainder = sympy.div(numerator.as_poly(), denominator.as_poly())
    if not remainder.is_zero:
        return None
    return MultiPoly.from_sympy(quotient)


def polynomial_gcd(first: MultiPoly, second: MultiPoly) -> MultiPoly:
    """
    Return the monic greatest common divisor.
    """
    return MultiPoly.from_sympy(sympy.gcd(first.as_poly(), second.as_poly()))


def normalize(poly: MultiPoly) -> MultiPoly:
    """
    Return the primitive integer part of ``poly`` with a positive leading coefficient.
    """
    if poly.is_zero:
        return poly
    denominators = [coeff.denominator for _, coeff in poly.terms]
    multiple = functools.reduce(lambda a, b: a * b // math.gcd(a, b), denominators, 1)
    numerators = [int(coeff * multiple) for _, coeff in poly.terms]
    content = functools.reduce(math.gcd, numerators, 0)
    factor = Fraction(multiple, content)
    if poly.leading_coefficient < 0:
        factor = -factor
    return poly.scale(factor)


def float_value(poly: MultiPoly, point: Sequence[float]) -> float:
    return float(NumericPolynomial.build(poly).value(np.asarray([point], dtype=float))[0])


@attr.s(frozen=True, eq=False)
class _NumericTerms:
    exponents: "np.ndarray[Any, Any]" = attr.ib()
    coefficients: "np.ndarray[Any, Any]" = attr.ib()

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "_NumericTerms":
        if poly.is_zero:
            return cls(np.zeros((1, poly.nvars), dtype=int), np.zeros(1))
        return cls(
            np.array([exponents for exponents, _ in poly.terms], dtype=int),
            np.array([float(coeff) for _, coeff in poly.terms]),
        )

    def __call__(self, points: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        monomials = np.prod(points[:, None, :] ** self.exponents[None, :, :], axis=2)
        return monomials @ self.coefficients


@attr.s(frozen=True, eq=False)
class NumericPolynomial:
    """
    Vectorised float evaluation of a polynomial, its gradient and Hessian.

    Every method takes points as the rows of an ``(N, n)`` array.
    """

    poly: MultiPoly = attr.ib()
    _value: _NumericTerms = attr.ib()
    _gradient: Tuple[_NumericTerms, ...] = attr.ib()
    _hessian: Tuple[Tuple[_NumericTerms, ...], ...] = attr.ib()

    @classmethod
    def build(cls, poly: MultiPoly) -> "NumericPolynomial":
        return _numeric_cache(poly)

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def value(self, points: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        return self._value(np.atleast_2d(np.asarray(points, dtype=float)))

    def gradient(self, points: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.stack([item(points) for item in self._gradient], axis=1)

    def hessian(self, points: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.stack(
            [np.stack([item(points) for item in row], axis=1) for row in self._hessian], axis=1
        )

    def scaled_residual(self, points: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        """
        Return ``|f(x)| / (1 + |grad f(x)|)``.
        """
        return np.abs(self.value(points)) / (1.0 + np.linalg.norm(self.gradient(points), axis=1))


@functools.lru_cache(maxsize=128)
def _numeric_cache(poly: MultiPoly) -> NumericPolynomial:
    first = gradient(poly)
    second = [gradient(item) for item in first]
    return NumericPolynomial(
        poly,
        _NumericTerms.from_poly(poly),
        tuple(_NumericTerms.from_poly(item) for item in first),
        tuple(tuple(_NumericTerms.from_poly(item) for item in row) for row in second),
    )
