# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Test types, Voronoi cones and strata of points on a hypersurface.
"""
import random
from fractions import Fraction

import pytest
from pytest_subtests import SubTests

from polyvor import arith
from polyvor import catalog
from polyvor import polytope
from polyvor import variety
from polyvor.exceptions import EmptyGenerators
from polyvor.exceptions import PointNotOnVariety
from polyvor.exceptions import SingularPoint
from polyvor.exceptions import VarietyPointError
from polyvor.polynomials import MultiPoly
from polyvor.polytope import UnitBall
from polyvor.variety import Hypersurface
from tests.conftest import surface


def circle_point(t: Fraction) -> tuple:
    return ((1 - t * t) / (1 + t * t), 2 * t / (1 + t * t))


def test_hypersurface_validation() -> None:
    with pytest.raises(VarietyPointError):
        Hypersurface(poly=MultiPoly.constant(3, 2))
    with pytest.raises(VarietyPointError):
        Hypersurface(poly=MultiPoly.zero(2))


def test_smooth_gradient(subtests: SubTests, circle: Hypersurface) -> None:
    with subtests.test("smooth"):
        assert circle.smooth_gradient(["3/5", "4/5"]) == (Fraction(6, 5), Fraction(8, 5))
    with subtests.test("off the variety"):
        with pytest.raises(PointNotOnVariety) as exc:
            circle.smooth_gradient([0, 0])
        assert exc.value.residual == -1
    with subtests.test("wrong dimension"):
        with pytest.raises(PointNotOnVariety):
            circle.smooth_gradient([1, 0, 0])
    with subtests.test("singular"):
        with pytest.raises(SingularPoint):
            surface("y**2 - x**3").smooth_gradient([0, 0])


def test_type_of(subtests: SubTests, square: UnitBall, parabola: Hypersurface, circle: Hypersurface) -> None:
    with subtests.test("parabola vertex type"):
        result = variety.type_of(parabola, square, [2, 4])
        assert {square.face_vertices(face) for face in result.faces(square)} == {
            (arith.vector([1, -1]),),
            (arith.vector([-1, 1]),),
        }
        assert result.primary_id == square.vertex_face(arith.vector([1, -1])).id
        assert result.is_codim_one
    with subtests.test("circle edge type"):
        result = variety.type_of(circle, square, [0, 1])
        assert set(result.face_ids) == {
            square.facet(arith.vector([0, -1])).id,
            square.facet(arith.vector([0, 1])).id,
        }
    with subtests.test("circle vertex type"):
        result = variety.type_of(circle, square, ["3/5", "4/5"])
        assert set(result.face_ids) == {
            square.vertex_face(arith.vector([-1, -1])).id,
            square.vertex_face(arith.vector([1, 1])).id,
        }
    with subtests.test("off the variety"):
        with pytest.raises(PointNotOnVariety):
            variety.type_of(circle, square, [0, 0])


def test_type_is_negation_closed(square: UnitBall, circle: Hypersurface) -> None:
    for step in range(-6, 7):
        point = circle_point(Fraction(step, 3))
        result = variety.type_of(circle, square, point)
        assert len(result.face_ids) == 2
        for face in result.faces(square):
            assert face.negation_id in result.face_ids


def test_type_is_scale_invariant(square: UnitBall) -> None:
    base = MultiPoly.parse("y - x**2", 2)
    original = variety.type_of(Hypersurface(poly=base), square, [2, 4])
    for factor in ("3/7", "5"):
        scaled = variety.type_of(Hypersurface(poly=base.scale(factor)), square, [2, 4])
        assert scaled == original
    flipped = variety.type_of(Hypersurface(poly=base.scale("-2")), square, [2, 4])
    assert flipped.face_ids == original.face_ids
    assert flipped.primary_id == square.face(original.primary_id).negation_id


def test_type_general(subtests: SubTests, cube: UnitBall) -> None:
    with subtests.test("twisted cubic at the origin"):
        result = variety.type_general(catalog.twisted_cubic_normals(Fraction(0))[1], cube)
        dims = [face.dim for face in result.faces(cube)]
        assert sorted(dims) == [1] * 4 + [2] * 4
        assert not result.is_codim_one
    with subtests.test("twisted cubic away from the origin"):
        result = variety.type_general(catalog.twisted_cubic_normals(Fraction(3, 5))[1], cube)
        dims = [face.dim for face in result.faces(cube)]
        assert sorted(dims) == [0] * 6 + [1] * 6
    with subtests.test("negation closed"):
        for face in result.faces(cube):
            assert face.negation_id in result.face_ids
    with subtests.test("no generators"):
        with pytest.raises(EmptyGenerators):
            variety.type_general([], cube)


def test_voronoi_cone(
    subtests: SubTests,
    square: UnitBall,
    cube: UnitBall,
    circle: Hypersurface,
    parabola: Hypersurface,
    hyperboloid: Hypersurface,
) -> None:
    with subtests.test("circle rays"):
        result = variety.voronoi_cone(circle, square, ["3/5", "4/5"])
        assert result.apex == (Fraction(3, 5), Fraction(4, 5))
        assert {cone.generators for cone in result.cones} == {
            (arith.vector([1, 1]),),
            (arith.vector([-1, -1]),),
        }
        assert all(not cone.open_flag for cone in result.cones)
        assert result.dimension == 1
    with subtests.test("parabola half planes"):
        result = variety.voronoi_cone(parabola, square, [0, 0])
        assert {frozenset(cone.generators) for cone in result.cones} == {
            frozenset([arith.vector([-1, 1]), arith.vector([1, 1])]),
            frozenset([arith.vector([1, -1]), arith.vector([-1, -1])]),
        }
        assert result.dimension == 2
    with subtests.test("hyperboloid cones around the x axis"):
        result = variety.voronoi_cone(hyperboloid, cube, [1, 0, 0])
        assert result.dimension == 3
        assert len(result.cones) == 2
        inside = [
            polytope.in_open_cone(cone, arith.vector(point))
            for cone in result.cones
            for point in ([2, 0, 0], [0, 0, 0])
        ]
        assert sorted(inside) == [False, False, True, True]


def test_voronoi_generators_are_negated_vertices(cube: UnitBall, octahedron: UnitBall) -> None:
    for ball in (cube, octahedron):
        dual = polytope.dual_ball(ball)
        for face in ball.faces:
            cone = polytope.cone_generators(dual, polytope.dual_face(ball, face))
            assert set(cone.generators) == {arith.neg(vertex) for vertex in ball.face_vertices(face)}


def test_stratum_of(
    subtests: SubTests,
    square: UnitBall,
    cube: UnitBall,
    circle: Hypersurface,
    hyperboloid: Hypersurface,
) -> None:
    with subtests.test("hyperboloid facet points"):
        for point in ([1, 0, 0], [-1, 0, 0], [0, 2, 0], [0, -2, 0]):
            assert variety.stratum_of(hyperboloid, cube, point).index == 0
    with subtests.test("circle vertex type"):
        assert variety.stratum_of(circle, square, ["3/5", "4/5"]).index == 1
    with subtests.test("circle edge type"):
        assert variety.stratum_of(circle, square, [1, 0]).index == 0
    with subtests.test("certificate"):
        for step in range(-5, 6):
            point = circle_point(Fraction(step, 4))
            label = variety.stratum_of(circle, square, point)
            grad = circle.gradient_at(point)
            total = tuple(Fraction(0) for _ in grad)
            for coefficient, generator in zip(label.certificate, label.generators):
                total = arith.add(total, arith.scale(coefficient, generator))
            assert total == grad
            assert all(value > 0 for value in label.certificate)
            assert arith.rank_of_vectors(label.generators) == 2 - square.face(label.face_id).dim


def test_optimizing_face_condition(square: UnitBall, circle: Hypersurface) -> None:
    result = variety.type_of(circle, square, ["3/5", "4/5"])
    corner = square.vertex_face(arith.vector([-1, -1]))
    assert variety.optimizing_face_condition(square, result, corner)
    assert variety.optimizing_face_condition(square, result, square.facet(arith.vector([0, -1])))
    assert variety.optimizing_face_condition(square, result, square.facet(arith.vector([0, 1])))
    assert not variety.optimizing_face_condition(square, result, square.vertex_face(arith.vector([1, -1])))


@pytest.mark.parametrize("ball_name", ["square", "diamond"])
def test_type_general_agrees_with_type_of(
    request: pytest.FixtureRequest, ball_name: str, circle: Hypersurface, parabola: Hypersurface
) -> None:
    ball = request.getfixturevalue(ball_name)
    rng = random.Random(ball_name)
    curves = (
        (circle, circle_point),
        (parabola, lambda t: (t, t * t)),
    )
    for curve, point_at in curves:
        for _ in range(50):
            point = point_at(Fraction(rng.randint(-40, 40), rng.randint(1, 9)))
            grad = curve.smooth_gradient(point)
            general = variety.type_general([grad], ball)
            assert general.face_ids == variety.type_of(curve, ball, point).face_ids
            assert general.is_codim_one
