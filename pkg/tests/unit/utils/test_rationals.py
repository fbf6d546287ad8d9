# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
#
import pathlib
from decimal import Decimal
from fractions import Fraction

import pytest

from polyvor.exceptions import ProblemFileError
from polyvor.utils import format_rational
from polyvor.utils import format_vector
from polyvor.utils import rational_vector
from polyvor.utils import rationalize
from polyvor.utils import rationalize_vector
from polyvor.utils import resolved_pathlib_path
from polyvor.utils import to_rational


@pytest.mark.parametrize(
    "value,expected",
    [
        ("3/5", Fraction(3, 5)),
        (" -7 ", Fraction(-7)),
        ("0.25", Fraction(1, 4)),
        (4, Fraction(4)),
        (Fraction(2, 6), Fraction(1, 3)),
    ],
)
def test_to_rational(value, expected) -> None:
    assert to_rational(value) == expected


@pytest.mark.parametrize("value", [0.5, True, "1/0", "three", None, Decimal("0.1")])
def test_to_rational_refused(value) -> None:
    with pytest.raises(ProblemFileError):
        to_rational(value)


def test_format() -> None:
    assert format_rational(Fraction(-3, 5)) == "-3/5"
    assert format_rational(Fraction(8, 4)) == "2"
    assert format_vector(rational_vector(["1/2", 0, "-4"])) == ["1/2", "0", "-4"]


def test_rationalize() -> None:
    assert rationalize(0.6000000000001) == Fraction(3, 5)
    assert rationalize(1 / 3, denominator_cap=10) == Fraction(1, 3)
    assert rationalize_vector([1.0, -0.125]) == (Fraction(1), Fraction(-1, 8))
    with pytest.raises(ValueError):
        rationalize(float("nan"))


def test_resolved_pathlib_path(tmp_path: pathlib.Path) -> None:
    path = resolved_pathlib_path(str(tmp_path / "sub" / ".." / "problem.json"))
    assert isinstance(path, pathlib.Path)
    assert path == (tmp_path / "problem.json").resolve()
