# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Custom Types.
"""
import itertools
import logging
from fractions import Fraction
from typing import Any
from typing import Iterator
from typing import Sequence
from typing import Tuple

import attr
import numpy as np

log = logging.getLogger(__name__)

RationalVector = Tuple[Fraction, ...]
FloatVector = Tuple[float, ...]


def _convert_bounds(value: Sequence[Sequence[float]]) -> Tuple[Tuple[float, float], ...]:
    return tuple((float(low), float(high)) for (low, high) in value)


@attr.s(frozen=True, kw_only=True)
class Box:
    """
    Axis aligned search box.

    Keyword Arguments:
        bounds:
            One ``(low, high)`` pair per coordinate
    """

    bounds: Tuple[Tuple[float, float], ...] = attr.ib(converter=_convert_bounds)

    @bounds.validator
    def _validate_bounds(self, attribute: Any, value: Tuple[Tuple[float, float], ...]) -> None:
        if not value:
            raise ValueError("A box needs at least one coordinate range")
        for low, high in value:
            if not low < high:
                raise ValueError(f"Empty box range [{low}, {high}]")

    @classmethod
    def around(cls, center: Sequence[float], radius: float) -> "Box":
        """
        Return the cube of the given half width centered at ``center``.
        """
        return cls(bounds=[(float(c) - radius, float(c) + radius) for c in center])

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> "np.ndarray[Any, Any]":
        return np.array([low for low, _ in self.bounds])

    @property
    def upper(self) -> "np.ndarray[Any, Any]":
        return np.array([high for _, high in self.bounds])

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, points: "np.ndarray[Any, Any]", margin: float = 0.0) -> "np.ndarray[Any, Any]":
        """
        Return a boolean mask of the rows of ``points`` lying inside the box.
        """
        points = np.atleast_2d(points)
        return np.all((points >= self.lower - margin) & (points <= self.upper + margin), axis=1)

    def grid(self, per_axis: int) -> "np.ndarray[Any, Any]":
        """
        Return a regular grid with ``per_axis`` nodes per coordinate, as rows.

        An odd ``per_axis`` keeps the box center, and therefore coordinate planes through it, on
        the grid.
        """
        axes = [np.linspace(low, high, per_axis) for low, high in self.bounds]
        return np.array(list(itertools.product(*axes)), dtype=float)

    def iter_axes(self) -> Iterator[Tuple[float, float]]:
        yield from self.bounds
