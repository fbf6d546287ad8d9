# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Polyvor related exceptions.

Every exception carries an ``exit_code`` class attribute which the command line interface uses as
the process exit status.
"""
from typing import Any
from typing import Optional
from typing import Sequence


class PolyvorException(Exception):
    """
    Base polyvor exception.
    """

    exit_code: int = 1


class DimensionMismatch(PolyvorException, ValueError):
    """
    Exception raised when vectors, matrices or polynomials of incompatible sizes are combined.
    """


class SingularMatrix(PolyvorException, ArithmeticError):
    """
    Exception raised when inverting a rank deficient matrix.
    """


class BallError(PolyvorException):
    """
    Exception raised when a functional set does not define a valid unit ball.
    """

    exit_code = 2


class UnboundedBall(BallError):
    """
    Exception raised when the functionals do not span the ambient space.
    """


class AsymmetricBall(BallError):
    """
    Exception raised when the functional set is not closed under negation.
    """


class DegenerateBall(BallError):
    """
    Exception raised for zero functionals or lower dimensional balls.
    """


class RedundantFunctional(BallError):
    """
    Exception raised when a functional does not support a facet of the ball.
    """


class FaceNotFound(PolyvorException, LookupError):
    """
    Exception raised when a face is not part of a ball's face lattice.
    """


class ZeroVector(PolyvorException, ValueError):
    """
    Exception raised when a nonzero vector is required.
    """


class EmptyGenerators(PolyvorException, ValueError):
    """
    Exception raised when a cone is described without generators.
    """


class PolynomialError(PolyvorException):
    """
    Base polynomial exception.
    """


class ZeroPolynomialDivision(PolynomialError, ZeroDivisionError):
    """
    Exception raised when dividing by the zero polynomial.
    """


class ConstantInLambda(PolynomialError):
    """
    Exception raised when both resultant inputs have degree zero in the line parameter.
    """


class VarietyPointError(PolyvorException):
    """
    Exception raised when a point is not admissible for a variety query.

    Arguments:
        message:
            The exception message

    Keyword Arguments:
        point:
            The offending point
        residual:
            The value, or gradient norm, which made the point inadmissible
    """

    def __init__(
        self, message: str, point: Optional[Sequence[Any]] = None, residual: Optional[Any] = None
    ) -> None:
        super().__init__()
        self.message = message
        self.point = point
        self.residual = residual

    def __str__(self) -> str:
        """
        Return a printable representation of the exception.
        """
        message = self.message
        if self.point is not None:
            message += "\n Point: ({})".format(", ".join(str(coord) for coord in self.point))
        if self.residual is not None:
            message += f"\n Residual: {self.residual}"
        return message


class PointNotOnVariety(VarietyPointError):
    """
    Exception raised when a point does not satisfy the defining polynomial.

    Please look at :py:class:`~polyvor.exceptions.VarietyPointError` for the supported keyword
    arguments documentation.
    """

    exit_code = 3


class SingularPoint(VarietyPointError):
    """
    Exception raised when the gradient vanishes at a point of the variety.

    Please look at :py:class:`~polyvor.exceptions.VarietyPointError` for the supported keyword
    arguments documentation.
    """

    exit_code = 4


class PointOnVariety(VarietyPointError):
    """
    Exception raised when a medial axis query is made at a point of the variety.
    """

    exit_code = 3


class OracleFailure(PolyvorException):
    """
    Exception raised when the floating point distance oracle cannot answer a query.
    """

    exit_code = 5


class NoVarietyPoints(OracleFailure):
    """
    Exception raised when no points of the variety are found in the search box.
    """


class PointOffSphere(OracleFailure):
    """
    Exception raised when a point does not lie on the norm sphere it is claimed to lie on.
    """


class ProblemFileError(PolyvorException):
    """
    Exception raised when a problem file cannot be parsed.
    """
