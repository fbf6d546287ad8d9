# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Ready made norms and problems.

Every problem here is also reachable from the command line through ``--example NAME``.
"""
from fractions import Fraction
from typing import Callable
from typing import Dict
from typing import List
from typing import Sequence
from typing import Tuple

from polyvor.customtypes import RationalVector
from polyvor.exceptions import ProblemFileError
from polyvor.polynomials import MultiPoly
from polyvor.problem import ProblemFile


def square_functionals() -> List[RationalVector]:
    """
    The l-infinity norm in the plane, unit ball ``[-1, 1]^2``.
    """
    return _signed_axes(2)


def diamond_functionals() -> List[RationalVector]:
    """
    The l1 norm in the plane, the dual of the square.
    """
    return _signed_corners(2)


def cube_functionals() -> List[RationalVector]:
    return _signed_axes(3)


def octahedron_functionals() -> List[RationalVector]:
    return _signed_corners(3)


def _signed_axes(dimension: int) -> List[RationalVector]:
    functionals = []
    for axis in range(dimension):
        for sign in (1, -1):
            functionals.append(
                tuple(Fraction(sign if idx == axis else 0) for idx in range(dimension))
            )
    return functionals


def _signed_corners(dimension: int) -> List[RationalVector]:
    corners: List[RationalVector] = [()]
    for _ in range(dimension):
        corners = [corner + (Fraction(sign),) for corner in corners for sign in (1, -1)]
    return corners


BALLS: Dict[str, Callable[[], List[RationalVector]]] = {
    "square": square_functionals,
    "diamond": diamond_functionals,
    "cube": cube_functionals,
    "octahedron": octahedron_functionals,
}


def _problem(
    name: str,
    ball: Sequence[RationalVector],
    polynomial: str,
    points: Sequence[Sequence[str]] = (),
    box: Sequence[Tuple[float, float]] = (),
) -> ProblemFile:
    return ProblemFile(
        name=name,
        ball=ball,
        polynomial=MultiPoly.parse(polynomial, len(ball[0])),
        points=points,
        box=box or None,
    )


def parabola(ball: str = "square") -> ProblemFile:
    return _problem("parabola", BALLS[ball](), "y - x**2", [("2", "4"), ("0", "0")], [(-3, 3), (-3, 3)])


def circle(ball: str = "square") -> ProblemFile:
    return _problem(
        "circle", BALLS[ball](), "x**2 + y**2 - 1", [("0", "1"), ("3/5", "4/5")], [(-2, 2), (-2, 2)]
    )


def ellipse(ball: str = "square") -> ProblemFile:
    return _problem("ellipse", BALLS[ball](), "4*x**2 + y**2 - 4", [("1", "0"), ("0", "2")], [(-3, 3), (-3, 3)])


def line(ball: str = "square") -> ProblemFile:
    """
    The line ``x = 0``, which is parallel to two facets of the square.
    """
    return _problem("line", BALLS[ball](), "x", [("0", "1")], [(-2, 2), (-2, 2)])


def quartic(ball: str = "square") -> ProblemFile:
    """
    ``y = 2x^2 - 2x^4``, a curve whose medial axis under the square norm has interior points.
    """
    return _problem("quartic", BALLS[ball](), "y - 2*x**2 + 2*x**4", [("0", "0")], [(-2, 2), (-2, 2)])


def hyperboloid(ball: str = "cube") -> ProblemFile:
    """
    The one sheeted hyperboloid ``36x^2 + 9y^2 - 4z^2 = 36``.

    Its facet type points under the cube norm are ``(+-1, 0, 0)`` and ``(0, +-2, 0)``.
    """
    return _problem(
        "hyperboloid",
        BALLS[ball](),
        "36*x**2 + 9*y**2 - 4*z**2 - 36",
        [("1", "0", "0"), ("-1", "0", "0"), ("0", "2", "0"), ("0", "-2", "0")],
        [(-3, 3), (-3, 3), (-3, 3)],
    )


def torus(ball: str = "cube") -> ProblemFile:
    """
    The torus with radii 2 and 1 around the z axis.
    """
    return _problem(
        "torus",
        BALLS[ball](),
        "(x**2 + y**2 + z**2 + 3)**2 - 16*(x**2 + y**2)",
        [("3", "0", "0"), ("1", "0", "0")],
        [(-3.5, 3.5), (-3.5, 3.5), (-1.5, 1.5)],
    )


def twisted_cubic_normals(parameter: Fraction) -> Tuple[RationalVector, Tuple[RationalVector, ...]]:
    """
    Return the point ``(t, t^2, t^3)`` of the twisted cubic and generators of its normal plane.
    """
    t = Fraction(parameter)
    slope, curvature = 2 * t, 3 * t * t
    point = (t, t * t, t * t * t)
    generators = (
        (-slope, Fraction(1), Fraction(0)),
        (-curvature, Fraction(0), Fraction(1)),
    )
    return point, generators


def twisted_cubic(ball: str = "cube") -> ProblemFile:
    """
    The twisted cubic, a curve in space given by its normal planes at two points.
    """
    queries = [twisted_cubic_normals(Fraction(0)), twisted_cubic_normals(Fraction(3, 5))]
    return ProblemFile(
        name="twisted-cubic",
        ball=BALLS[ball](),
        points=[point for point, _ in queries],
        normals=[generators for _, generators in queries],
    )


EXAMPLES: Dict[str, Callable[..., ProblemFile]] = {
    "parabola": parabola,
    "circle": circle,
    "ellipse": ellipse,
    "line": line,
    "quartic": quartic,
    "hyperboloid": hyperboloid,
    "torus": torus,
    "twisted-cubic": twisted_cubic,
}


def load_example(name: str) -> ProblemFile:
    """
    Return the named example. ``NAME:BALL`` selects another ball, as in ``circle:diamond``.
    """
    problem, _, ball = name.partition(":")
    if problem not in EXAMPLES:
        raise ProblemFileError(
            "Unknown example {!r}. Choose from: {}".format(name, ", ".join(sorted(EXAMPLES)))
        )
    if ball and ball not in BALLS:
        raise ProblemFileError(
            "Unknown ball {!r}. Choose from: {}".format(ball, ", ".join(sorted(BALLS)))
        )
    if ball:
        return EXAMPLES[problem](ball)
    return EXAMPLES[problem]()
