# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Test the inner normal fan helpers of ``polyvor.polytope``.
"""
import random
from fractions import Fraction

import pytest
from pytest_subtests import SubTests

from polyvor import arith
from polyvor import polytope
from polyvor.exceptions import DimensionMismatch
from polyvor.exceptions import EmptyGenerators
from polyvor.exceptions import ZeroVector
from polyvor.polytope import ConeDescription
from polyvor.polytope import UnitBall


def random_direction(rng: random.Random, dimension: int) -> tuple:
    while True:
        direction = tuple(Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for _ in range(dimension))
        if not arith.is_zero(direction):
            return direction


def test_minimizing_face(subtests: SubTests, square: UnitBall) -> None:
    with subtests.test("parabola gradient picks a vertex"):
        face = polytope.minimizing_face(square, arith.vector([-4, 1]))
        assert square.face_vertices(face) == (arith.vector([1, -1]),)
    with subtests.test("axis direction picks an edge"):
        face = polytope.minimizing_face(square, arith.vector([0, 1]))
        assert face.dim == 1
        assert square.face_vertices(face) == (arith.vector([-1, -1]), arith.vector([1, -1]))
    with subtests.test("diagonal"):
        face = polytope.minimizing_face(square, arith.vector([1, 1]))
        assert square.face_vertices(face) == (arith.vector([-1, -1]),)
    with subtests.test("zero vector"):
        with pytest.raises(ZeroVector):
            polytope.minimizing_face(square, arith.vector([0, 0]))
    with subtests.test("dimension mismatch"):
        with pytest.raises(DimensionMismatch):
            polytope.minimizing_face(square, arith.vector([0, 0, 1]))


def test_cone_generators(subtests: SubTests, square: UnitBall, cube: UnitBall) -> None:
    with subtests.test("square vertex"):
        cone = polytope.cone_generators(square, square.vertex_face(arith.vector([1, -1])))
        assert set(cone.generators) == {arith.vector([-1, 0]), arith.vector([0, 1])}
        assert cone.open_flag is True
        assert cone.dimension == 2
    with subtests.test("square edge"):
        cone = polytope.cone_generators(square, square.facet(arith.vector([0, -1])))
        assert cone.generators == (arith.vector([0, 1]),)
        assert cone.dimension == 1
    with subtests.test("cube vertex"):
        cone = polytope.cone_generators(cube, cube.vertex_face(arith.vector([1, 1, 1])))
        assert set(cone.generators) == {
            arith.vector(item) for item in [(-1, 0, 0), (0, -1, 0), (0, 0, -1)]
        }


def test_in_open_cone(subtests: SubTests) -> None:
    quadrant = ConeDescription(apex=[0, 0], generators=[(-1, 0), (0, 1)])
    with subtests.test("interior"):
        assert polytope.in_open_cone(quadrant, arith.vector([-4, 1])) is True
    with subtests.test("boundary ray"):
        assert polytope.in_open_cone(quadrant, arith.vector([0, 1])) is False
        assert polytope.in_closed_cone(quadrant, arith.vector([0, 1])) is True
    with subtests.test("outside"):
        assert polytope.in_open_cone(quadrant, arith.vector([1, 0])) is False
        assert polytope.in_closed_cone(quadrant, arith.vector([1, 0])) is False
    with subtests.test("apex"):
        with pytest.raises(ZeroVector):
            polytope.in_open_cone(quadrant, arith.vector([0, 0]))
        assert polytope.in_closed_cone(quadrant, arith.vector([0, 0])) is False
    with subtests.test("translated apex"):
        moved = quadrant.translate(arith.vector([2, 4]))
        assert polytope.in_open_cone(moved, arith.vector([-2, 5])) is True
        assert polytope.in_open_cone(moved, arith.vector([-4, 1])) is False
    with subtests.test("empty generators"):
        with pytest.raises(EmptyGenerators):
            polytope.in_open_cone(ConeDescription(apex=[0, 0], generators=[]), arith.vector([1, 0]))


def test_cone_closure_faces(subtests: SubTests, square: UnitBall, cube: UnitBall) -> None:
    with subtests.test("square vertex"):
        vertex = square.vertex_face(arith.vector([1, -1]))
        closure = polytope.cone_closure_faces(square, vertex)
        assert closure[0] == vertex
        assert {face.id for face in closure[1:]} == {
            square.facet(arith.vector([1, 0])).id,
            square.facet(arith.vector([0, -1])).id,
        }
    with subtests.test("square edge"):
        edge = square.facet(arith.vector([0, 1]))
        assert polytope.cone_closure_faces(square, edge) == [edge]
    with subtests.test("cube edge"):
        edge = next(face for face in cube.faces if face.dim == 1)
        closure = polytope.cone_closure_faces(cube, edge)
        assert closure[0] == edge
        assert [face.dim for face in closure[1:]] == [2, 2]


def test_positive_combination(subtests: SubTests) -> None:
    with subtests.test("independent"):
        result = polytope.positive_combination([(1, 0), (1, 1)], arith.vector([2, 1]))
        assert result.coefficients == (1, 1)
        assert result.strict
    with subtests.test("dependent generators use the linear program"):
        result = polytope.positive_combination([(1, 0), (0, 1), (1, 1)], arith.vector([1, 1]))
        assert result.strict
        assert result.slack > 0
    with subtests.test("outside"):
        result = polytope.positive_combination([(1, 0), (0, 1), (1, 1)], arith.vector([-1, 1]))
        assert result.coefficients is None
        assert not result.strict
    with subtests.test("unknown method"):
        with pytest.raises(ValueError):
            polytope.positive_combination([(1, 0), (0, 1), (1, 1)], arith.vector([1, 1]), method="nope")


def test_fan_partitions_space(square: UnitBall, cube: UnitBall, octahedron: UnitBall) -> None:
    rng = random.Random(1234)
    for ball, count in ((square, 60), (cube, 40), (octahedron, 25)):
        for _ in range(count):
            direction = random_direction(rng, ball.dimension)
            owners = [
                face
                for face in ball.faces
                if polytope.in_open_cone(polytope.cone_generators(ball, face), direction)
            ]
            assert owners == [polytope.minimizing_face(ball, direction)]


def test_linear_program_agrees_with_linear_solve(
    square: UnitBall, diamond: UnitBall, cube: UnitBall, octahedron: UnitBall
) -> None:
    rng = random.Random(99)
    for ball in (square, diamond, cube, octahedron):
        for _ in range(200):
            direction = random_direction(rng, ball.dimension)
            for face in (polytope.minimizing_face(ball, direction), rng.choice(ball.faces)):
                cone = polytope.cone_generators(ball, face)
                exact = polytope.positive_combination(cone.generators, direction)
                solved = polytope.positive_combination(cone.generators, direction, method="lp")
                assert exact.strict == solved.strict
                if exact.strict:
                    assert exact.slack == solved.slack


def test_span_meets_open_cone(subtests: SubTests) -> None:
    with subtests.test("meets"):
        cone = ConeDescription(apex=[0, 0], generators=[(1, 1), (1, -1)])
        result = polytope.span_meets_open_cone([(1, 0)], cone)
        assert result is not None
        assert all(value > 0 for value in result.coefficients)
    with subtests.test("negative direction of the span also counts"):
        cone = ConeDescription(apex=[0, 0], generators=[(-1, 1), (-1, -1)])
        assert polytope.span_meets_open_cone([(1, 0)], cone) is not None
    with subtests.test("misses"):
        cone = ConeDescription(apex=[0, 0], generators=[(1, 0), (1, 1)])
        assert polytope.span_meets_open_cone([(0, 1)], cone) is None
    with subtests.test("dimension mismatch"):
        cone = ConeDescription(apex=[0, 0], generators=[(1, 0)])
        with pytest.raises(DimensionMismatch):
            polytope.span_meets_open_cone([(0, 1, 0)], cone)
