# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
#
"""
Small helpers shared across polyvor.
"""
import math
import numbers
import pathlib
from fractions import Fraction
from typing import Any
from typing import Iterable
from typing import List
from typing import Sequence
from typing import Union

from polyvor.customtypes import RationalVector
from polyvor.exceptions import ProblemFileError


def resolved_pathlib_path(path: Union[str, pathlib.Path]) -> pathlib.Path:
    """
    Return a resolved ``pathlib.Path``.
    """
    if isinstance(path, str):
        path = pathlib.Path(path)
    return path.resolve()


def to_rational(value: Any) -> Fraction:
    """
    Convert ``value`` into an exact :py:class:`~fractions.Fraction`.

    Strings are parsed exactly, either as ``"p/q"``, integers or finite decimals. Floats are
    refused since they would silently carry binary rounding into exact computations.

    Arguments:
        value:
            A string, integer, or rational number

    Returns:
        Fraction: The exact value
    """
    if isinstance(value, bool):
        raise ProblemFileError(f"Booleans are not rational numbers: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ProblemFileError(f"Cannot parse {value!r} as a rational number: {exc}") from exc
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    raise ProblemFileError(
        f"Refusing to coerce {value!r} of type {type(value).__name__} into an exact rational. "
        "Write rationals as strings like '3/5'."
    )


def rational_vector(values: Iterable[Any]) -> RationalVector:
    """
    Convert an iterable of rational-like values into a rational vector.
    """
    return tuple(to_rational(value) for value in values)


def format_rational(value: Fraction) -> str:
    """
    Serialize a rational as ``"p/q"``, or ``"p"`` for integers.
    """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_vector(values: Sequence[Fraction]) -> List[str]:
    """
    Serialize a rational vector as a list of strings.
    """
    return [format_rational(value) for value in values]


def rationalize(value: float, denominator_cap: int = 10**6) -> Fraction:
    """
    Return the best rational approximation of ``value`` with a bounded denominator.

    The approximation is the continued fraction convergent chosen by
    :py:meth:`fractions.Fraction.limit_denominator`.
    """
    if not math.isfinite(value):
        raise ValueError(f"Cannot rationalize {value!r}")
    return Fraction(value).limit_denominator(denominator_cap)


def rationalize_vector(values: Iterable[float], denominator_cap: int = 10**6) -> RationalVector:
    """
    Rationalize every coordinate of a float vector.
    """
    return tuple(rationalize(float(value), denominator_cap) for value in values)
