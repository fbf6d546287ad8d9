# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Centrally symmetric unit balls of polyhedral norms, their face lattices, duals and inner normal fans.

A polyhedral norm is given by a finite, negation closed set of linear functionals ``L`` and reads
``h(x) = max(l(x) for l in L)``. Its unit ball is ``{x : l(x) <= 1 for all l in L}``. Functionals are
taken literally: scaling a functional changes the ball.

The inner normal cone of a face ``F`` is the open cone of vectors whose minimum over the ball is
attained exactly on ``F``. It is the strictly positive span of the negated functionals active on
``F``.
"""
import functools
import itertools
import logging
from fractions import Fraction
from typing import Any
from typing import Dict
from typing import FrozenSet
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr
import sympy
from sympy.solvers.simplex import InfeasibleLPError
from sympy.solvers.simplex import linprog
from sympy.solvers.simplex import UnboundedLPError

from polyvor import arith
from polyvor.customtypes import RationalVector
from polyvor.exceptions import AsymmetricBall
from polyvor.exceptions import DegenerateBall
from polyvor.exceptions import DimensionMismatch
from polyvor.exceptions import EmptyGenerators
from polyvor.exceptions import FaceNotFound
from polyvor.exceptions import RedundantFunctional
from polyvor.exceptions import UnboundedBall
from polyvor.exceptions import ZeroVector

log = logging.getLogger(__name__)


def _to_vectors(value: Sequence[Sequence[Any]]) -> Tuple[RationalVector, ...]:
    return tuple(arith.vector(item) for item in value)


@attr.s(frozen=True, kw_only=True)
class FunctionalSet:
    """
    A negation closed set of nonzero linear functionals.

    Keyword Arguments:
        functionals:
            The functional coefficient vectors; ``l`` acts by ``x -> dot(l, x)``
    """

    functionals: Tuple[RationalVector, ...] = attr.ib(converter=_to_vectors)

    @functionals.validator
    def _validate_functionals(self, attribute: Any, value: Tuple[RationalVector, ...]) -> None:
        if not value:
            raise DegenerateBall("At least one functional is required")
        dimension = len(value[0])
        if dimension < 1 or any(len(item) != dimension for item in value):
            raise DimensionMismatch("All functionals must have the same positive dimension")
        if any(arith.is_zero(item) for item in value):
            raise DegenerateBall("The zero functional does not define a norm")
        if len(set(value)) != len(value):
            raise RedundantFunctional("The functional set contains duplicates")
        present = set(value)
        missing = [item for item in value if arith.neg(item) not in present]
        if missing:
            raise AsymmetricBall(
                "The functional set is not closed under negation; missing the negation of {}".format(
                    ", ".join(str(tuple(str(c) for c in item)) for item in missing)
                )
            )

    @property
    def dimension(self) -> int:
        return len(self.functionals[0])

    def __len__(self) -> int:
        return len(self.functionals)

    def __getitem__(self, index: int) -> RationalVector:
        return self.functionals[index]


@attr.s(frozen=True, kw_only=True)
class Face:
    """
    A proper nonempty face of a unit ball.

    Keyword Arguments:
        id:
            Position of the face in :py:attr:`UnitBall.faces`
        dim:
            Dimension of the face, ``n - rank(active functionals)``
        vertex_ids:
            Indices into :py:attr:`UnitBall.vertices`
        active_functional_ids:
            Indices of the functionals which are identically one on the face
        negation_id:
            Id of the face ``-F``
    """

    id: int = attr.ib()
    dim: int = attr.ib()
    vertex_ids: FrozenSet[int] = attr.ib(converter=frozenset)
    active_functional_ids: FrozenSet[int] = attr.ib(converter=frozenset)
    negation_id: int = attr.ib()


@attr.s(frozen=True, kw_only=True)
class ConeDescription:
    """
    A cone with apex, generators, and openness.

    An open cone is ``apex`` plus the strictly positive span of the generators. A closed cone is
    ``apex`` plus the nonnegative span of the generators, minus the apex itself.
    """

    apex: RationalVector = attr.ib(converter=arith.vector)
    generators: Tuple[RationalVector, ...] = attr.ib(converter=_to_vectors)
    open_flag: bool = attr.ib(default=True)

    @generators.validator
    def _validate_generators(self, attribute: Any, value: Tuple[RationalVector, ...]) -> None:
        if any(arith.is_zero(item) for item in value):
            raise ZeroVector("Cone generators must be nonzero")
        if any(len(item) != len(self.apex) for item in value):
            raise DimensionMismatch("Cone generators and apex have different dimensions")

    @property
    def dimension(self) -> int:
        """
        Dimension of the linear span of the generators.
        """
        return arith.rank_of_vectors(self.generators)

    def translate(self, apex: Sequence[Fraction]) -> "ConeDescription":
        return attr.evolve(self, apex=apex)

    def closure(self) -> "ConeDescription":
        return attr.evolve(self, open_flag=False)


@attr.s(frozen=True, kw_only=True)
class UnitBall:
    """
    A centrally symmetric polytope with both representations and its face lattice.

    Instances are built by :py:func:`build_ball`.
    """

    functionals: FunctionalSet = attr.ib()
    vertices: Tuple[RationalVector, ...] = attr.ib()
    faces: Tuple[Face, ...] = attr.ib()

    @property
    def dimension(self) -> int:
        return self.functionals.dimension

    def face(self, face_id: int) -> Face:
        try:
            return self.faces[face_id]
        except IndexError:
            raise FaceNotFound(f"The ball has no face with id {face_id}") from None

    def face_vertices(self, face: Face) -> Tuple[RationalVector, ...]:
        return tuple(self.vertices[idx] for idx in sorted(face.vertex_ids))

    def face_functionals(self, face: Face) -> Tuple[RationalVector, ...]:
        return tuple(self.functionals[idx] for idx in sorted(face.active_functional_ids))

    def face_by_vertex_ids(self, vertex_ids: FrozenSet[int]) -> Face:
        for face in self.faces:
            if face.vertex_ids == vertex_ids:
                return face
        raise FaceNotFound(f"No face has the vertex set {sorted(vertex_ids)}")

    def vertex_face(self, point: Sequence[Fraction]) -> Face:
        """
        Return the zero dimensional face at the given vertex coordinates.
        """
        point = arith.vector(point)
        try:
            index = self.vertices.index(point)
        except ValueError:
            raise FaceNotFound(f"{point} is not a vertex of the ball") from None
        return self.face_by_vertex_ids(frozenset([index]))

    def facet(self, functional: Sequence[Fraction]) -> Face:
        """
        Return the facet supported by the given functional.
        """
        functional = arith.vector(functional)
        try:
            index = self.functionals.functionals.index(functional)
        except ValueError:
            raise FaceNotFound(f"{functional} is not one of the ball's functionals") from None
        for face in self.faces:
            if face.dim == self.dimension - 1 and face.active_functional_ids == {index}:
                return face
        raise FaceNotFound(f"The functional {functional} supports no facet")  # pragma: no cover

    def codim_index(self, face: Face) -> int:
        """
        Return ``i`` such that the face belongs to ``F_i``, the faces of dimension ``n - 1 - i``.
        """
        return self.dimension - 1 - face.dim

    def contains_face(self, face: Face) -> bool:
        return 0 <= face.id < len(self.faces) and self.faces[face.id] == face


def _affine_dimension(points: Sequence[RationalVector]) -> int:
    base = points[0]
    return arith.rank_of_vectors([arith.sub(point, base) for point in points[1:]])


def build_ball(functionals: FunctionalSet) -> UnitBall:
    """
    Build the unit ball of the polyhedral norm defined by ``functionals``.

    Vertices are found by solving every ``n``-subset of functionals at value one and keeping the
    feasible solutions. The face lattice is the closure under intersection of the facet vertex sets.

    Arguments:
        functionals:
            A negation closed functional set

    Returns:
        UnitBall: The ball with vertices and face lattice

    Raises:
        UnboundedBall: the functionals do not span the space, so the region is unbounded
        RedundantFunctional: a functional supports no facet
        DegenerateBall: the region is lower dimensional
    """
    dimension = functionals.dimension
    items = functionals.functionals
    if arith.rank_of_vectors(items) < dimension:
        raise UnboundedBall(
            f"The region defined by the functionals is unbounded: they span less than {dimension} "
            "dimensions"
        )
    ones = [Fraction(1)] * dimension
    found = set()
    for subset in itertools.combinations(range(len(items)), dimension):
        matrix = arith.RationalMatrix(rows=[items[idx] for idx in subset])
        if arith.determinant(matrix) == 0:
            continue
        candidate = arith.solve_linear(matrix, ones)
        if candidate is None:  # pragma: no cover
            continue
        if all(arith.dot(item, candidate) <= 1 for item in items):
            found.add(candidate)
    vertices = tuple(sorted(found))
    log.debug("Found %d vertices for %d functionals in dimension %d", len(vertices), len(items), dimension)
    if len(vertices) < dimension + 1 or _affine_dimension(vertices) < dimension:
        raise DegenerateBall("The unit ball is lower dimensional")

    active: List[FrozenSet[int]] = [
        frozenset(idx for idx, item in enumerate(items) if arith.dot(item, vertex) == 1)
        for vertex in vertices
    ]
    facet_sets: Dict[int, FrozenSet[int]] = {}
    for idx in range(len(items)):
        support = frozenset(vidx for vidx, act in enumerate(active) if idx in act)
        if not support or _affine_dimension([vertices[v] for v in support]) != dimension - 1:
            raise RedundantFunctional(
                "The functional {} does not support a facet of the ball".format(
                    tuple(str(c) for c in items[idx])
                )
            )
        facet_sets[idx] = support

    vertex_sets = set(facet_sets.values())
    frontier = set(vertex_sets)
    while frontier:
        discovered = set()
        for left in frontier:
            for right in vertex_sets:
                meet = left & right
                if meet and meet not in vertex_sets:
                    discovered.add(meet)
        vertex_sets |= discovered
        frontier = discovered

    records = []
    for vertex_set in vertex_sets:
        face_active = frozenset.intersection(*(active[v] for v in vertex_set))
        face_dim = dimension - arith.rank_of_vectors([items[idx] for idx in face_active])
        records.append((face_dim, tuple(sorted(vertex_set)), face_active))
    records.sort()
    index_of = {frozenset(record[1]): idx for idx, record in enumerate(records)}
    vertex_index = {vertex: idx for idx, vertex in enumerate(vertices)}
    negated = []
    for vertex in vertices:
        try:
            negated.append(vertex_index[arith.neg(vertex)])
        except KeyError:  # pragma: no cover
            raise AsymmetricBall(f"The ball is not centrally symmetric at vertex {vertex}") from None
    faces = tuple(
        Face(
            id=idx,
            dim=face_dim,
            vertex_ids=vertex_ids,
            active_functional_ids=face_active,
            negation_id=index_of[frozenset(negated[v] for v in vertex_ids)],
        )
        for idx, (face_dim, vertex_ids, face_active) in enumerate(records)
    )
    log.debug(
        "Built ball with face counts %s",
        {d: sum(1 for face in faces if face.dim == d) for d in range(dimension)},
    )
    return UnitBall(functionals=functionals, vertices=vertices, faces=faces)


def ball_from_functionals(functionals: Sequence[Sequence[Any]]) -> UnitBall:
    """
    Shortcut for ``build_ball(FunctionalSet(functionals=functionals))``.
    """
    return build_ball(FunctionalSet(functionals=functionals))


@functools.lru_cache(maxsize=64)
def dual_ball(ball: UnitBall) -> UnitBall:
    """
    Return the polar dual ball, whose functionals are the vertices of ``ball``.
    """
    return build_ball(FunctionalSet(functionals=ball.vertices))


def dual_face(ball: UnitBall, face: Face) -> Face:
    """
    Return the face ``F*`` of the dual ball whose vertices are the functionals active on ``face``.

    The dual face has dimension ``n - 1 - dim(F)``.
    """
    if not ball.contains_face(face):
        raise FaceNotFound(f"Face {face.id} is not part of the ball's face lattice")
    dual = dual_ball(ball)
    wanted = set(ball.face_functionals(face))
    vertex_ids = frozenset(idx for idx, vertex in enumerate(dual.vertices) if vertex in wanted)
    return dual.face_by_vertex_ids(vertex_ids)


def norm_value(ball: UnitBall, point: Sequence[Fraction]) -> Fraction:
    """
    Return ``h(x) = max(l(x))`` exactly.
    """
    if len(point) != ball.dimension:
        raise DimensionMismatch(f"Point of dimension {len(point)} in a {ball.dimension}-ball")
    return max(arith.dot(item, point) for item in ball.functionals.functionals)


def minimizing_face(ball: UnitBall, direction: Sequence[Fraction]) -> Face:
    """
    Return the face on which ``<direction, .>`` attains its minimum over the ball.

    This is the unique face whose open inner normal cone contains ``direction``. Ties resolve to
    the face spanned by every minimizing vertex.
    """
    direction = arith.vector(direction)
    if len(direction) != ball.dimension:
        raise DimensionMismatch(f"Vector of dimension {len(direction)} in a {ball.dimension}-ball")
    if arith.is_zero(direction):
        raise ZeroVector("The zero vector lies in no inner normal cone")
    values = [arith.dot(direction, vertex) for vertex in ball.vertices]
    lowest = min(values)
    return ball.face_by_vertex_ids(
        frozenset(idx for idx, value in enumerate(values) if value == lowest)
    )


def cone_generators(ball: UnitBall, face: Face) -> ConeDescription:
    """
    Return the open inner normal cone of ``face``, generated by the negated active functionals.
    """
    if not ball.contains_face(face):
        raise FaceNotFound(f"Face {face.id} is not part of the ball's face lattice")
    return ConeDescription(
        apex=[0] * ball.dimension,
        generators=[arith.neg(item) for item in ball.face_functionals(face)],
        open_flag=True,
    )


def _sympy_rational(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value: Any) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


@attr.s(frozen=True, kw_only=True)
class PositiveCombination:
    """
    Outcome of a strict positive combination search.

    Keyword Arguments:
        coefficients:
            The coefficients found, ``None`` when the target is not in the closed cone
        slack:
            The smallest coefficient, capped at one
    """

    coefficients: Optional[RationalVector] = attr.ib()
    slack: Fraction = attr.ib()

    @property
    def strict(self) -> bool:
        return self.coefficients is not None and self.slack > 0


def positive_combination(
    generators: Sequence[Sequence[Fraction]], target: Sequence[Fraction], method: str = "auto"
) -> PositiveCombination:
    """
    Write ``target`` as a combination of ``generators`` maximizing the smallest coefficient.

    With linearly independent generators the coefficients are unique and found by an exact linear
    solve. Otherwise, or when ``method`` is ``"lp"``, the exact rational linear program

        maximize t  subject to  sum(c_i g_i) == target,  c_i >= t,  0 <= t <= 1

    is solved with :py:func:`sympy.solvers.simplex.linprog`.

    Arguments:
        generators:
            The cone generators
        target:
            The vector to decompose

    Keyword Arguments:
        method:
            ``"auto"`` or ``"lp"``
    """
    if not generators:
        raise EmptyGenerators("A cone needs at least one generator")
    dimension = len(target)
    count = len(generators)
    if any(len(item) != dimension for item in generators):
        raise DimensionMismatch("Generators and target have different dimensions")
    if method == "auto" and arith.rank_of_vectors(generators) == count:
        coefficients = arith.solve_linear(arith.RationalMatrix.from_columns(generators), target)
        if coefficients is None or any(value < 0 for value in coefficients):
            return PositiveCombination(coefficients=None, slack=Fraction(-1))
        return PositiveCombination(coefficients=coefficients, slack=min(min(coefficients), Fraction(1)))
    if method not in ("auto", "lp"):
        raise ValueError(f"Unknown method {method!r}")

    # Variables: c_1..c_k, t, all nonnegative.
    objective = sympy.Matrix([0] * count + [-1])
    equalities = sympy.Matrix(
        [[_sympy_rational(item[row]) for item in generators] + [0] for row in range(dimension)]
    )
    equality_rhs = sympy.Matrix([_sympy_rational(value) for value in target])
    inequalities = sympy.Matrix(
        [[-int(col == idx) for col in range(count)] + [1] for idx in range(count)]
        + [[0] * count + [1]]
    )
    inequality_rhs = sympy.Matrix([0] * count + [1])
    try:
        optimum, argument = linprog(
            objective, inequalities, inequality_rhs, A_eq=equalities, b_eq=equality_rhs
        )
    except InfeasibleLPError:
        log.debug("Target %s is outside the closed cone of %s", tuple(target), generators)
        return PositiveCombination(coefficients=None, slack=Fraction(-1))
    except UnboundedLPError:  # pragma: no cover
        raise
    values = [_fraction(value) for value in list(argument)]
    return PositiveCombination(coefficients=tuple(values[:count]), slack=-_fraction(optimum))


def in_open_cone(cone: ConeDescription, point: Sequence[Fraction], method: str = "auto") -> bool:
    """
    Return whether ``point - apex`` is a strictly positive combination of the generators.
    """
    if not cone.generators:
        raise EmptyGenerators("A cone needs at least one generator")
    offset = arith.sub(point, cone.apex)
    if arith.is_zero(offset):
        raise ZeroVector("Cone membership is undefined at the apex")
    return positive_combination(cone.generators, offset, method=method).strict


def in_closed_cone(cone: ConeDescription, point: Sequence[Fraction], method: str = "auto") -> bool:
    """
    Return whether ``point - apex`` is a nonzero nonnegative combination of the generators.
    """
    if not cone.generators:
        raise EmptyGenerators("A cone needs at least one generator")
    offset = arith.sub(point, cone.apex)
    if arith.is_zero(offset):
        return False
    return positive_combination(cone.generators, offset, method=method).coefficients is not None


def cone_closure_faces(ball: UnitBall, face: Face) -> List[Face]:
    """
    Return the faces ``F'`` containing ``face``; the closed cone of ``face`` is the disjoint union of
    their open cones.
    """
    if not ball.contains_face(face):
        raise FaceNotFound(f"Face {face.id} is not part of the ball's face lattice")
    return [other for other in ball.faces if face.vertex_ids <= other.vertex_ids]


def faces_of_codim_index(ball: UnitBall, index: int) -> List[Face]:
    """
    Return ``F_i``, the faces of dimension ``n - 1 - i``.
    """
    if not 0 <= index <= ball.dimension - 1:
        raise ValueError(f"Index {index} is outside [0, {ball.dimension - 1}]")
    return [face for face in ball.faces if face.dim == ball.dimension - 1 - index]


def face_counts(ball: UnitBall) -> Dict[int, int]:
    """
    Return the number of faces per dimension; the fan has as many cones per codimension index.
    """
    return {dim: sum(1 for face in ball.faces if face.dim == dim) for dim in range(ball.dimension)}


@attr.s(frozen=True, kw_only=True)
class FaceIncidence:
    """
    Incidence summary of a face.

    Keyword Arguments:
        face_id:
            The face
        dim:
            Face dimension
        vertex_ids:
            Vertices of the face
        facet_ids:
            Ids of the facets containing the face
        cone_dim:
            Dimension of the face's inner normal cone, ``n - dim``
    """

    face_id: int = attr.ib()
    dim: int = attr.ib()
    vertex_ids: Tuple[int, ...] = attr.ib()
    facet_ids: Tuple[int, ...] = attr.ib()
    cone_dim: int = attr.ib()


def face_incidence(ball: UnitBall) -> List[FaceIncidence]:
    """
    Return the incidence summary of every face, in face id order.
    """
    facets = [face for face in ball.faces if face.dim == ball.dimension - 1]
    return [
        FaceIncidence(
            face_id=face.id,
            dim=face.dim,
            vertex_ids=tuple(sorted(face.vertex_ids)),
            facet_ids=tuple(facet.id for facet in facets if face.vertex_ids <= facet.vertex_ids),
            cone_dim=ball.dimension - face.dim,
        )
        for face in ball.faces
    ]


def fan_cone_counts(ball: UnitBall) -> Dict[int, int]:
    """
    Return the number of inner normal cones per cone dimension.
    """
    counts: Dict[int, int] = {}
    for item in face_incidence(ball):
        counts[item.cone_dim] = counts.get(item.cone_dim, 0) + 1
    return dict(sorted(counts.items()))


def span_meets_open_cone(
    span_generators: Sequence[Sequence[Fraction]], cone: ConeDescription
) -> Optional[PositiveCombination]:
    """
    Decide whether the linear span of ``span_generators`` meets the open cone ``cone``.

    Solves, exactly, ``maximize t`` subject to ``sum(m_k n_k) == sum(c_i g_i)``, ``c_i >= t`` and
    ``0 <= t <= 1``, with free ``m`` split as ``m+ - m-``. The span meets the open cone iff the
    optimum is positive.

    Returns:
        The cone coefficients when the span meets the open cone, otherwise ``None``
    """
    if not span_generators or not cone.generators:
        raise EmptyGenerators("Both the span and the cone need at least one generator")
    dimension = len(cone.apex)
    if any(len(item) != dimension for item in span_generators):
        raise DimensionMismatch("Span generators and cone have different dimensions")
    span_count = len(span_generators)
    count = len(cone.generators)
    width = 2 * span_count + count + 1
    # Variables: m+ (span_count), m- (span_count), c (count), t.
    objective = sympy.Matrix([0] * (width - 1) + [-1])
    equalities = sympy.Matrix(
        [
            [-_sympy_rational(item[row]) for item in span_generators]
            + [_sympy_rational(item[row]) for item in span_generators]
            + [_sympy_rational(item[row]) for item in cone.generators]
            + [0]
            for row in range(dimension)
        ]
    )
    equality_rhs = sympy.zeros(dimension, 1)
    inequalities = sympy.Matrix(
        [
            [0] * (2 * span_count) + [-int(col == idx) for col in range(count)] + [1]
            for idx in range(count)
        ]
        + [[0] * (width - 1) + [1]]
    )
    inequality_rhs = sympy.Matrix([0] * count + [1])
    try:
        optimum, argument = linprog(
            objective, inequalities, inequality_rhs, A_eq=equalities, b_eq=equality_rhs
        )
    except UnboundedLPError:  # pragma: no cover
        raise
    slack = -_fraction(optimum)
    if slack <= 0:
        return None
    values = [_fraction(value) for value in list(argument)]
    return PositiveCombination(
        coefficients=tuple(values[2 * span_count : 2 * span_count + count]), slack=slack
    )
