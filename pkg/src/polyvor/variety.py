# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Local Voronoi geometry of points on a hypersurface ``X = V(f)`` under a polyhedral norm.

The type of a smooth point ``v`` is the antipodal face pair ``{F, -F}`` where ``F`` is the face of
the unit ball whose open inner normal cone contains ``grad f(v)``. The point belongs to the stratum
``X_i`` with ``i = n - 1 - dim(F)``, and its Voronoi cone is the union of the closed cones at ``v``
spanned by the negated vertices of ``F`` and of ``-F``.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr
import numpy as np
from scipy.spatial import cKDTree

from polyvor import arith
from polyvor import polytope
from polyvor import sampling
from polyvor.config import SamplingParams
from polyvor.customtypes import Box
from polyvor.customtypes import FloatVector
from polyvor.customtypes import RationalVector
from polyvor.exceptions import EmptyGenerators
from polyvor.exceptions import NoVarietyPoints
from polyvor.exceptions import PointNotOnVariety
from polyvor.exceptions import SingularPoint
from polyvor.exceptions import VarietyPointError
from polyvor.polynomials import MultiPoly
from polyvor.polynomials import NumericPolynomial
from polyvor.polynomials import evaluate
from polyvor.polynomials import gradient
from polyvor.polytope import ConeDescription
from polyvor.polytope import Face
from polyvor.polytope import UnitBall
from polyvor.utils import rationalize_vector

log = logging.getLogger(__name__)


def _nonconstant(instance: Any, attribute: Any, value: MultiPoly) -> None:
    if value.is_constant:
        raise VarietyPointError("A hypersurface needs a nonconstant defining polynomial")


@attr.s(frozen=True, kw_only=True)
class Hypersurface:
    """
    The zero set of a nonconstant polynomial.

    Keyword Arguments:
        poly:
            The defining polynomial ``f``
    """

    poly: MultiPoly = attr.ib(validator=_nonconstant)
    gradient: Tuple[MultiPoly, ...] = attr.ib(init=False)

    @gradient.default
    def _compute_gradient(self) -> Tuple[MultiPoly, ...]:
        return tuple(gradient(self.poly))

    @property
    def dimension(self) -> int:
        return self.poly.nvars

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def numeric(self) -> NumericPolynomial:
        return NumericPolynomial.build(self.poly)

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return evaluate(self.poly, point)

    def gradient_at(self, point: Sequence[Fraction]) -> RationalVector:
        return tuple(evaluate(item, point) for item in self.gradient)

    def smooth_gradient(self, point: Sequence[Any]) -> RationalVector:
        """
        Return the exact gradient at a smooth point of ``X``.

        Raises:
            PointNotOnVariety: ``f(point) != 0``
            SingularPoint: the gradient vanishes
        """
        point = arith.vector(point)
        if len(point) != self.dimension:
            raise PointNotOnVariety(
                f"Point of dimension {len(point)} for a hypersurface in {self.dimension} variables",
                point=point,
            )
        residual = self.value(point)
        if residual != 0:
            raise PointNotOnVariety("The point is not on the variety", point=point, residual=residual)
        grad = self.gradient_at(point)
        if arith.is_zero(grad):
            raise SingularPoint("The gradient vanishes at the point", point=point, residual=grad)
        return grad


@attr.s(frozen=True, kw_only=True)
class TypeResult:
    """
    The faces of the unit ball forming the type of a point.

    Keyword Arguments:
        face_ids:
            Sorted ids of the faces, closed under negation
        is_codim_one:
            Whether the type was computed from a single normal vector
        primary_id:
            For hypersurface points, the face whose inner normal cone contains the gradient
    """

    face_ids: Tuple[int, ...] = attr.ib(converter=lambda value: tuple(sorted(set(value))))
    is_codim_one: bool = attr.ib()
    primary_id: Optional[int] = attr.ib(default=None)

    def faces(self, ball: UnitBall) -> List[Face]:
        return [ball.face(face_id) for face_id in self.face_ids]


@attr.s(frozen=True, kw_only=True)
class VoronoiCone:
    """
    The closed cones at ``apex`` containing the Voronoi cell of a point of ``X``.

    Keyword Arguments:
        apex:
            The point of ``X``
        face_ids:
            The type faces, ``face_ids[k]`` produced ``cones[k]``
        cones:
            Closed cones generated by the negated vertices of each type face
    """

    apex: RationalVector = attr.ib(converter=arith.vector)
    face_ids: Tuple[int, ...] = attr.ib(converter=tuple)
    cones: Tuple[ConeDescription, ...] = attr.ib(converter=tuple)

    @property
    def dimension(self) -> int:
        return max(cone.dimension for cone in self.cones)


@attr.s(frozen=True, kw_only=True)
class StratumLabel:
    """
    Stratum membership with its exact certificate.

    Keyword Arguments:
        index:
            The stratum ``i``; the Voronoi cone has dimension ``n - i``
        face_id:
            The face of ``F_i`` whose cone contains the gradient
        generators:
            The inner normals ``w_j`` of the face
        certificate:
            Positive coefficients with ``grad f(v) == sum(certificate[j] * generators[j])``
    """

    index: int = attr.ib()
    face_id: int = attr.ib()
    generators: Tuple[RationalVector, ...] = attr.ib(converter=tuple)
    certificate: RationalVector = attr.ib(converter=tuple)


@attr.s(frozen=True, kw_only=True)
class SampleLabel:
    """
    Classification of a sampled floating point point of ``X``.

    Keyword Arguments:
        point:
            The sampled point
        rational_point:
            Its rationalization, which is classified exactly
        exact_index:
            Stratum of the exact gradient at ``rational_point``, ``None`` when singular
        face_id:
            The face realizing ``exact_index``
        advisory_index:
            Stratum of the float gradient located in the fan with the boundary slack
        near_boundary:
            The exact and advisory labels disagree, or the certificate is within slack of a wall
        singular:
            The exact gradient vanishes
    """

    point: FloatVector = attr.ib(converter=lambda value: tuple(float(c) for c in value))
    rational_point: RationalVector = attr.ib(converter=tuple)
    exact_index: Optional[int] = attr.ib()
    face_id: Optional[int] = attr.ib()
    advisory_index: Optional[int] = attr.ib()
    near_boundary: bool = attr.ib(default=False)
    singular: bool = attr.ib(default=False)


@attr.s(frozen=True, kw_only=True)
class ClosureAnomaly:
    """
    A sampled stratum ``index`` point with no stratum ``index + 1`` sample within ``radius``.
    """

    point: FloatVector = attr.ib(converter=tuple)
    index: int = attr.ib()
    nearest: float = attr.ib()
    radius: float = attr.ib()


def type_of(surface: Hypersurface, ball: UnitBall, point: Sequence[Any]) -> TypeResult:
    """
    Return the type ``{F, -F}`` of a smooth point of ``X``.
    """
    grad = surface.smooth_gradient(point)
    face = polytope.minimizing_face(ball, grad)
    log.debug("Gradient %s lies in the cone of face %d", grad, face.id)
    return TypeResult(face_ids=(face.id, face.negation_id), is_codim_one=True, primary_id=face.id)


def type_general(normal_generators: Sequence[Sequence[Any]], ball: UnitBall) -> TypeResult:
    """
    Return the faces whose open inner normal cone meets the normal space spanned by
    ``normal_generators``.

    Each face is decided by an exact strict feasibility linear program.
    """
    generators = [arith.vector(item) for item in normal_generators]
    if not generators:
        raise EmptyGenerators("The normal space needs at least one generator")
    faces = [
        face.id
        for face in ball.faces
        if polytope.span_meets_open_cone(generators, polytope.cone_generators(ball, face))
        is not None
    ]
    return TypeResult(face_ids=faces, is_codim_one=len(generators) == 1)


def voronoi_cone(surface: Hypersurface, ball: UnitBall, point: Sequence[Any]) -> VoronoiCone:
    """
    Return the Voronoi cone of a smooth point: for every type face ``F`` the closed cone at the
    point over the inner normal cone of the dual face ``F*``, which is generated by the negated
    vertices of ``F``.
    """
    apex = arith.vector(point)
    result = type_of(surface, ball, apex)
    dual = polytope.dual_ball(ball)
    cones = []
    for face_id in result.face_ids:
        dual_face = polytope.dual_face(ball, ball.face(face_id))
        cone = polytope.cone_generators(dual, dual_face)
        cones.append(cone.translate(apex).closure())
    return VoronoiCone(apex=apex, face_ids=result.face_ids, cones=cones)


def _certificate(ball: UnitBall, face: Face, grad: Sequence[Fraction]) -> polytope.PositiveCombination:
    cone = polytope.cone_generators(ball, face)
    return polytope.positive_combination(cone.generators, grad)


def stratum_of(surface: Hypersurface, ball: UnitBall, point: Sequence[Any]) -> StratumLabel:
    """
    Return the stratum of a smooth point with its positive coefficient certificate.
    """
    grad = surface.smooth_gradient(point)
    return _stratum_from_gradient(ball, grad)


def _stratum_from_gradient(ball: UnitBall, grad: Sequence[Fraction]) -> StratumLabel:
    face = polytope.minimizing_face(ball, grad)
    combination = _certificate(ball, face, grad)
    if not combination.strict:  # pragma: no cover
        raise AssertionError(f"Gradient {grad} is not strictly inside the cone of face {face.id}")
    return StratumLabel(
        index=ball.codim_index(face),
        face_id=face.id,
        generators=polytope.cone_generators(ball, face).generators,
        certificate=combination.coefficients,  # type: ignore[arg-type]
    )


def optimizing_face_condition(ball: UnitBall, result: TypeResult, face: Face) -> bool:
    """
    Return whether ``face`` lies in the closure of the type: it contains one of the type faces, so
    its inner normal cone lies in the closed cone of that face.
    """
    return any(ball.face(face_id).vertex_ids <= face.vertex_ids for face_id in result.face_ids)


def advisory_face(ball: UnitBall, grad: Sequence[float], slack: float) -> Optional[Face]:
    """
    Locate a float vector in the inner normal fan, treating values within ``slack`` (relative) of
    the minimum over the vertices as ties.
    """
    vector = np.asarray(grad, dtype=float)
    scale = float(np.linalg.norm(vector))
    if not math.isfinite(scale) or scale == 0:
        return None
    vertices = np.array([[float(c) for c in vertex] for vertex in ball.vertices])
    values = vertices @ vector
    lowest = values.min()
    tied = np.flatnonzero(values <= lowest + slack * scale * max(1.0, float(np.abs(vertices).max())))
    # Tied vertices need not span a face; take the smallest face containing them.
    wanted = frozenset(int(idx) for idx in tied)
    candidates = [face for face in ball.faces if wanted <= face.vertex_ids]
    if not candidates:
        return None
    return min(candidates, key=lambda face: (face.dim, len(face.vertex_ids)))


def classify_sample(
    surface: Hypersurface, ball: UnitBall, point: Sequence[float], params: SamplingParams
) -> SampleLabel:
    """
    Classify a sampled point: exactly at its rationalization and advisorily from the float gradient.
    """
    rational = rationalize_vector(point, params.denominator_cap)
    grad = surface.gradient_at(rational)
    float_grad = surface.numeric.gradient(np.asarray([point], dtype=float))[0]
    advisory = advisory_face(ball, float_grad, params.boundary_slack)
    advisory_index = ball.codim_index(advisory) if advisory is not None else None
    if arith.is_zero(grad):
        return SampleLabel(
            point=point,
            rational_point=rational,
            exact_index=None,
            face_id=None,
            advisory_index=advisory_index,
            near_boundary=True,
            singular=True,
        )
    label = _stratum_from_gradient(ball, grad)
    scale = max(abs(float(c)) for c in grad)
    near = advisory_index != label.index or float(min(label.certificate)) < params.boundary_slack * scale
    return SampleLabel(
        point=point,
        rational_point=rational,
        exact_index=label.index,
        face_id=label.face_id,
        advisory_index=advisory_index,
        near_boundary=near,
    )


def _grid_size(count: int, dimension: int) -> int:
    size = max(9, int(round((4 * count) ** (1.0 / dimension))))
    return size if size % 2 else size + 1


def stratum_seeds(
    surface: Hypersurface,
    ball: UnitBall,
    box: Box,
    starts: "np.ndarray[Any, Any]",
    params: SamplingParams,
) -> List["np.ndarray[Any, Any]"]:
    """
    Project ``starts`` onto the lower dimensional strata.

    For every face ``F`` with index ``i < n - 1`` the points are moved by Gauss-Newton onto
    ``{f = 0, grad f in span(inner normals of F)}``, the set where the gradient can lie in the cone
    of ``F``. Converged points inside the box are returned grouped by index, index ``0`` first;
    their labels are decided by the classifier.
    """
    groups = []
    for index in range(ball.dimension - 1):
        found = []
        for face in polytope.faces_of_codim_index(ball, index):
            normals = [[float(c) for c in item] for item in polytope.cone_generators(ball, face).generators]
            projected, residuals = sampling.stratum_project(
                surface.numeric, normals, starts, params.newton_iterations, params.newton_tolerance
            )
            keep = (residuals <= 1e-9) & box.contains(projected)
            if keep.any():
                found.append(projected[keep])
        groups.append(np.concatenate(found) if found else np.zeros((0, ball.dimension)))
    return groups


def sample_and_classify(
    surface: Hypersurface,
    ball: UnitBall,
    box: Box,
    count: Optional[int] = None,
    seed: Optional[int] = None,
    params: Optional[SamplingParams] = None,
) -> List[SampleLabel]:
    """
    Sample about ``count`` points of ``X`` inside ``box`` and classify each one.

    Points come from grid seeding with Newton projection, plus a ``stratum_seed_fraction`` share
    of stratum targeted seeds. The result is deterministic for a fixed seed.

    Raises:
        NoVarietyPoints: no point of ``X`` was found in the box
    """
    if params is None:
        params = SamplingParams()
    overrides: Dict[str, int] = {}
    if count is not None:
        overrides["count"] = count
    if seed is not None:
        overrides["seed"] = seed
    params = attr.evolve(params, **overrides)
    if box.dimension != surface.dimension:
        raise ValueError(f"A {box.dimension}-dimensional box for a surface in {surface.dimension} variables")

    rng = np.random.default_rng(params.seed)
    merge = box.diameter * 1e-9
    generic = sampling.points_on_variety(
        surface.numeric,
        box,
        _grid_size(params.count, surface.dimension),
        params.newton_iterations,
        params.newton_tolerance,
        merge_tolerance=merge,
    )
    if len(generic) == 0:
        raise NoVarietyPoints(f"No points of the variety were found in {box.bounds}")
    targeted_count = int(params.count * params.stratum_seed_fraction)
    generic_count = params.count - targeted_count
    if len(generic) > generic_count:
        chosen = np.sort(rng.choice(len(generic), size=generic_count, replace=False))
        generic = generic[chosen]
    points = generic
    if targeted_count:
        starts = np.concatenate(
            [generic, box.lower + rng.random((len(generic), box.dimension)) * (box.upper - box.lower)]
        )
        # Lower strata are smaller and fill the targeted share first.
        remaining = targeted_count
        targeted = []
        for group in stratum_seeds(surface, ball, box, starts, params):
            if remaining <= 0:
                break
            group = sampling.dedupe(group, merge)
            if len(group) > remaining:
                group = sampling.farthest_point_subset(group, remaining)
            targeted.append(group)
            remaining -= len(group)
        points = sampling.dedupe(np.concatenate([generic] + targeted), merge)
    log.info("Classifying %d sampled points", len(points))
    with ThreadPoolExecutor(max_workers=params.threads) as executor:
        labels = list(
            executor.map(lambda point: classify_sample(surface, ball, tuple(point), params), points)
        )
    near = sum(1 for label in labels if label.near_boundary)
    if near:
        log.warning("%d of %d sampled labels are near a fan wall and only advisory", near, len(labels))
    return labels


def stratum_histogram(labels: Sequence[SampleLabel]) -> Dict[str, int]:
    """
    Count exact stratum indices; singular samples are counted under ``"singular"``.
    """
    histogram: Dict[str, int] = {}
    for label in labels:
        key = "singular" if label.exact_index is None else str(label.exact_index)
        histogram[key] = histogram.get(key, 0) + 1
    return dict(sorted(histogram.items()))


def closure_anomalies(labels: Sequence[SampleLabel], radius: float) -> List[ClosureAnomaly]:
    """
    Report stratum ``i`` samples with no stratum ``i + 1`` sample within ``radius``.

    Advisory labels are used, so points on a fan wall count towards the lower stratum.
    """
    by_index: Dict[int, List[FloatVector]] = {}
    for label in labels:
        if label.advisory_index is not None:
            by_index.setdefault(label.advisory_index, []).append(label.point)
    anomalies = []
    for index in sorted(by_index):
        if index >= len(by_index[index][0]) - 1:
            continue
        upper = by_index.get(index + 1)
        if upper is None:
            distances = np.full(len(by_index[index]), np.inf)
        else:
            distances, _ = cKDTree(np.asarray(upper)).query(np.asarray(by_index[index]))
        for point, distance in zip(by_index[index], np.atleast_1d(distances)):
            if distance > radius:
                anomalies.append(
                    ClosureAnomaly(point=point, index=index, nearest=float(distance), radius=radius)
                )
    if anomalies:
        log.warning(
            "%d sampled points are not within %s of the next stratum", len(anomalies), radius
        )
    return anomalies
