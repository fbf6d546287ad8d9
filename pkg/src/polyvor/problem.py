# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Problem files.

A problem file is a UTF-8 JSON document which drives every command:

.. code-block:: json

    {
      "name": "parabola",
      "ball": [["1", "0"], ["-1", "0"], ["0", "1"], ["0", "-1"]],
      "polynomial": [{"coeff": "1", "exponents": [0, 1]}, {"coeff": "-1", "exponents": [2, 0]}],
      "points": [["2", "4"]],
      "box": [[-3, 3], [-3, 3]],
      "params": {"search_radius": 4.0},
      "sampling": {"count": 400}
    }

Rationals are strings like ``"3/5"``; floats are refused wherever exact values are expected. The
polynomial may also be given as an expression string such as ``"y - x**2"``.
"""
import json
import logging
import pathlib
from typing import Any
from typing import Dict
from typing import Mapping
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import attr

from polyvor.config import OracleParams
from polyvor.config import SamplingParams
from polyvor.customtypes import Box
from polyvor.customtypes import RationalVector
from polyvor.exceptions import PolynomialError
from polyvor.exceptions import ProblemFileError
from polyvor.exceptions import VarietyPointError
from polyvor.polynomials import MultiPoly
from polyvor.polytope import FunctionalSet
from polyvor.polytope import UnitBall
from polyvor.polytope import build_ball
from polyvor.utils import format_vector
from polyvor.utils import rational_vector
from polyvor.utils import resolved_pathlib_path
from polyvor.variety import Hypersurface

log = logging.getLogger(__name__)

KNOWN_KEYS = ("name", "ball", "polynomial", "points", "normals", "box", "params", "sampling")


def _vectors(value: Sequence[Sequence[Any]]) -> Tuple[RationalVector, ...]:
    return tuple(rational_vector(item) for item in value)


def _optional_box(value: Any) -> Optional[Box]:
    if value is None or isinstance(value, Box):
        return value
    try:
        return Box(bounds=value)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"Invalid box {value!r}: {exc}") from exc


@attr.s(frozen=True, kw_only=True)
class ProblemFile:
    """
    A parsed problem.

    Keyword Arguments:
        ball:
            The functionals of the norm, as rational vectors
        polynomial:
            The defining polynomial of the hypersurface, if any
        points:
            Query points
        normals:
            Normal space generators per query point, for varieties of higher codimension which are
            given by their normal spaces instead of a polynomial
        box:
            Sampling and rendering box
        params:
            Distance oracle parameters
        sampling:
            Stratification sampler parameters
        name:
            An optional display name
    """

    ball: Tuple[RationalVector, ...] = attr.ib(converter=_vectors)
    polynomial: Optional[MultiPoly] = attr.ib(default=None)
    points: Tuple[RationalVector, ...] = attr.ib(default=(), converter=_vectors)
    normals: Tuple[Tuple[RationalVector, ...], ...] = attr.ib(
        default=(), converter=lambda value: tuple(_vectors(item) for item in value)
    )
    box: Optional[Box] = attr.ib(default=None, converter=_optional_box)
    params: Optional[OracleParams] = attr.ib(default=None)
    sampling: Optional[SamplingParams] = attr.ib(default=None)
    name: Optional[str] = attr.ib(default=None)

    def __attrs_post_init__(self) -> None:
        if not self.ball:
            raise ProblemFileError("A problem needs the functionals of its norm under 'ball'")
        dimension = len(self.ball[0])
        if self.polynomial is not None and self.polynomial.nvars != dimension:
            raise ProblemFileError(
                f"The polynomial has {self.polynomial.nvars} variables but the ball lives in "
                f"dimension {dimension}"
            )
        for point in self.points:
            if len(point) != dimension:
                raise ProblemFileError(f"Point {format_vector(point)} is not {dimension}-dimensional")
        if self.normals and len(self.normals) != len(self.points):
            raise ProblemFileError("'normals' needs one list of generators per point")
        if self.box is not None and self.box.dimension != dimension:
            raise ProblemFileError(f"The box is not {dimension}-dimensional")

    @property
    def dimension(self) -> int:
        return len(self.ball[0])

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProblemFile":
        """
        Parse a problem from its JSON data.
        """
        if not isinstance(data, Mapping):
            raise ProblemFileError("A problem file must hold a JSON object")
        unknown = sorted(set(data) - set(KNOWN_KEYS))
        if unknown:
            raise ProblemFileError("Unknown problem file keys: {}".format(", ".join(unknown)))
        if "ball" not in data:
            raise ProblemFileError("A problem needs the functionals of its norm under 'ball'")
        try:
            ball = _vectors(data["ball"])
        except TypeError as exc:
            raise ProblemFileError(f"Invalid 'ball': {exc}") from exc
        if not ball:
            raise ProblemFileError("A problem needs the functionals of its norm under 'ball'")
        nvars = len(ball[0])
        polynomial = None
        raw = data.get("polynomial")
        try:
            if isinstance(raw, str):
                polynomial = MultiPoly.parse(raw, nvars)
            elif raw is not None:
                polynomial = MultiPoly.from_term_list(raw, nvars)
        except (PolynomialError, KeyError, TypeError, ValueError) as exc:
            raise ProblemFileError(f"Invalid 'polynomial': {exc}") from exc
        params = data.get("params")
        sampling = data.get("sampling")
        try:
            return cls(
                ball=ball,
                polynomial=polynomial,
                points=data.get("points") or (),
                normals=data.get("normals") or (),
                box=data.get("box"),
                params=OracleParams.from_mapping(params) if params is not None else None,
                sampling=SamplingParams.from_mapping(sampling) if sampling is not None else None,
                name=data.get("name"),
            )
        except TypeError as exc:
            raise ProblemFileError(f"Invalid problem file: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        """
        Serialize the problem, the inverse of :py:meth:`from_dict`.
        """
        data: Dict[str, Any] = {}
        if self.name is not None:
            data["name"] = self.name
        data["ball"] = [format_vector(item) for item in self.ball]
        if self.polynomial is not None:
            data["polynomial"] = self.polynomial.to_term_list()
        if self.points:
            data["points"] = [format_vector(item) for item in self.points]
        if self.normals:
            data["normals"] = [[format_vector(item) for item in group] for group in self.normals]
        if self.box is not None:
            data["box"] = [list(bounds) for bounds in self.box.bounds]
        if self.params is not None:
            data["params"] = self.params.to_dict()
        if self.sampling is not None:
            data["sampling"] = self.sampling.to_dict()
        return data

    @classmethod
    def load(cls, path: Union[str, pathlib.Path]) -> "ProblemFile":
        path = resolved_pathlib_path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ProblemFileError(f"Cannot read the problem file {path}: {exc}") from exc
        except ValueError as exc:
            raise ProblemFileError(f"The problem file {path} is not valid JSON: {exc}") from exc
        log.debug("Loaded problem file %s", path)
        return cls.from_dict(data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def unit_ball(self) -> UnitBall:
        """
        Build the unit ball.

        Raises:
            BallError: the functionals do not define a polyhedral norm
        """
        return build_ball(FunctionalSet(functionals=self.ball))

    def hypersurface(self) -> Hypersurface:
        if self.polynomial is None:
            raise ProblemFileError("This command needs a 'polynomial'")
        try:
            return Hypersurface(poly=self.polynomial)
        except VarietyPointError as exc:
            raise ProblemFileError(f"Invalid 'polynomial': {exc}") from exc

    def oracle_params(self, seed: Optional[int] = None) -> OracleParams:
        params = self.params if self.params is not None else OracleParams()
        if self.box is not None and params.box is None:
            params = attr.evolve(params, box=self.box)
        if seed is not None:
            params = attr.evolve(params, seed=seed)
        return params

    def sampling_params(self, seed: Optional[int] = None) -> SamplingParams:
        params = self.sampling if self.sampling is not None else SamplingParams()
        if seed is not None:
            params = attr.evolve(params, seed=seed)
        return params

    def sampling_box(self) -> Box:
        if self.box is not None:
            return self.box
        if self.params is not None and self.params.box is not None:
            return self.params.box
        radius = self.params.search_radius if self.params is not None else OracleParams().search_radius
        return Box.around([0.0] * self.dimension, radius)
