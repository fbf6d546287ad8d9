# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Floating point distance oracle for ``d(u, X) = min(h(u - x) for x in X)``.

The oracle is the independent numerical check of the exact modules: it finds every nearest point
of ``X`` by sampling, refines them locally and reports the faces of the scaled unit ball on which
they are attained.
"""
import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import attr
import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from polyvor import arith
from polyvor import sampling
from polyvor.config import OracleParams
from polyvor.customtypes import Box
from polyvor.customtypes import FloatVector
from polyvor.exceptions import NoVarietyPoints
from polyvor.exceptions import PointOffSphere
from polyvor.exceptions import PointOnVariety
from polyvor.medial import EquidistantComponent
from polyvor.polynomials import MultiPoly
from polyvor.polynomials import NumericPolynomial
from polyvor.polytope import Face
from polyvor.polytope import UnitBall
from polyvor.variety import Hypersurface

log = logging.getLogger(__name__)


@attr.s(frozen=True, kw_only=True)
class DistanceResult:
    """
    Result of a distance query.

    Keyword Arguments:
        point:
            The query point ``u``
        value:
            ``h(u - x)`` at the best minimizer
        minimizers:
            Nearest points of ``X``, one per cluster, in lexicographic order
        values:
            ``h(u - x)`` per minimizer
        residuals:
            Scaled residual ``|f(x)| / (1 + |grad f(x)|)`` per minimizer
        optimizing_faces:
            Face of the unit ball on which each minimizer is attained, ``None`` when the value is zero
    """

    point: FloatVector = attr.ib(converter=lambda value: tuple(float(c) for c in value))
    value: float = attr.ib()
    minimizers: Tuple[FloatVector, ...] = attr.ib(converter=tuple)
    values: Tuple[float, ...] = attr.ib(converter=tuple)
    residuals: Tuple[float, ...] = attr.ib(converter=tuple)
    optimizing_faces: Tuple[Optional[int], ...] = attr.ib(converter=tuple)

    @property
    def approximate(self) -> bool:
        return True

    @property
    def is_medial(self) -> bool:
        return len(self.minimizers) >= 2


def _functional_matrix(ball: UnitBall) -> "np.ndarray[Any, Any]":
    return np.array([[float(c) for c in item] for item in ball.functionals.functionals])


def norm_values(ball: UnitBall, vectors: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
    """
    Vectorised ``h`` over the rows of ``vectors``.
    """
    return np.max(np.atleast_2d(vectors) @ _functional_matrix(ball).T, axis=1)


@functools.lru_cache(maxsize=32)
def _variety_sample(
    surface: Hypersurface, box: Box, per_axis: int, iterations: int, tolerance: float, residual: float
) -> "np.ndarray[Any, Any]":
    points = sampling.points_on_variety(
        surface.numeric,
        box,
        per_axis,
        iterations,
        tolerance,
        residual_tolerance=residual,
        merge_tolerance=box.diameter / (8 * per_axis),
    )
    points.setflags(write=False)
    return points


def _candidates(points: "np.ndarray[Any, Any]", values: "np.ndarray[Any, Any]", limit: int) -> List[int]:
    """
    Indices of sample points whose value is not above any of their nearest neighbours, best first.
    """
    neighbours = min(len(points), 2 * points.shape[1] + 3)
    _, index = cKDTree(points).query(points, k=neighbours)
    index = np.atleast_2d(index)
    local = np.all(values[:, None] <= values[index], axis=1)
    order = [int(idx) for idx in np.argsort(values, kind="stable") if local[idx]]
    best = int(np.argmin(values))
    if best not in order:  # pragma: no cover
        order.insert(0, best)
    return order[:limit]


def _refine(
    numeric: NumericPolynomial,
    functionals: "np.ndarray[Any, Any]",
    query: "np.ndarray[Any, Any]",
    start: "np.ndarray[Any, Any]",
    params: OracleParams,
) -> Tuple["np.ndarray[Any, Any]", float, float]:
    """
    Minimize ``s`` subject to ``s >= l(u - x)`` for every functional and ``f(x) == 0``.
    """
    dimension = len(start)

    def objective(z: "np.ndarray[Any, Any]") -> float:
        return float(z[-1])

    def objective_jac(z: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        grad = np.zeros(dimension + 1)
        grad[-1] = 1.0
        return grad

    def epigraph(z: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        return z[-1] - functionals @ (query - z[:dimension])

    epigraph_jac = np.hstack([functionals, np.ones((len(functionals), 1))])

    def on_variety(z: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        return numeric.value(z[None, :dimension])

    def on_variety_jac(z: "np.ndarray[Any, Any]") -> "np.ndarray[Any, Any]":
        return np.hstack([numeric.gradient(z[None, :dimension]), np.zeros((1, 1))])

    start_value = float(np.max(functionals @ (query - start)))
    result = minimize(
        objective,
        np.append(start, start_value),
        jac=objective_jac,
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": epigraph, "jac": lambda z: epigraph_jac},
            {"type": "eq", "fun": on_variety, "jac": on_variety_jac},
        ],
        options={"maxiter": params.refine_iterations, "ftol": params.refine_tolerance},
    )
    candidate = np.asarray(result.x[:dimension], dtype=float)
    projected, residuals = sampling.newton_project(
        numeric, candidate[None, :], params.newton_iterations, params.newton_tolerance
    )
    refined = projected[0]
    residual = float(residuals[0])
    value = float(np.max(functionals @ (query - refined)))
    if not np.isfinite(value) or residual > params.residual_tolerance or value > start_value:
        start_residual = float(numeric.scaled_residual(start[None, :])[0])
        return start, start_value, start_residual
    return refined, value, residual


def optimizing_face_of(
    ball: UnitBall,
    point: Sequence[float],
    minimizer: Sequence[float],
    value: float,
    tolerance: float = 1e-6,
) -> Face:
    """
    Return the smallest face of the scaled ball ``u + value * B`` containing the minimizer.

    The active functionals are those with ``|l(x - u) - value| <= tolerance * value``.

    Raises:
        PointOffSphere: ``value`` is not positive or ``x`` is not on the sphere of that radius
    """
    offset = np.asarray(minimizer, dtype=float) - np.asarray(point, dtype=float)
    functionals = _functional_matrix(ball)
    levels = functionals @ offset
    if value <= 0 or abs(float(levels.max()) - value) > tolerance * value:
        raise PointOffSphere(
            f"The point is not on the norm sphere of radius {value} about {tuple(point)}; "
            f"its norm distance is {float(levels.max())}"
        )
    active = [idx for idx, level in enumerate(levels) if abs(level - value) <= tolerance * value]
    vertex_ids = frozenset(
        vidx
        for vidx, vertex in enumerate(ball.vertices)
        if all(arith.dot(ball.functionals[idx], vertex) == 1 for idx in active)
    )
    return ball.face_by_vertex_ids(vertex_ids)


def distance_to_variety(
    surface: Hypersurface,
    ball: UnitBall,
    point: Sequence[Any],
    params: Optional[OracleParams] = None,
) -> DistanceResult:
    """
    Approximate ``d(u, X)`` and every nearest point.

    The variety is sampled by Newton projection of a grid over the search box, local minima of
    ``h(u - x)`` over the sample are refined with SLSQP on the epigraph form of the problem, and
    refined minimizers are clustered at ``merge_tolerance`` and kept within ``value_band`` of the
    minimum.

    Raises:
        NoVarietyPoints: no point of ``X`` lies in the search box
    """
    if params is None:
        params = OracleParams()
    query = np.asarray([float(c) for c in point], dtype=float)
    box = params.search_box(query)
    samples = _variety_sample(
        surface,
        box,
        params.grid_size(surface.dimension),
        params.newton_iterations,
        params.newton_tolerance,
        params.residual_tolerance,
    )
    if len(samples) == 0:
        raise NoVarietyPoints(f"No points of the variety were found in {box.bounds}")
    functionals = _functional_matrix(ball)
    values = norm_values(ball, query - samples)
    starts = _candidates(samples, values, params.refine_candidates)
    numeric = surface.numeric
    with ThreadPoolExecutor(max_workers=params.threads) as executor:
        refined = list(
            executor.map(
                lambda idx: _refine(numeric, functionals, query, samples[idx], params),
                starts,
            )
        )
    best = min(value for _, value, _ in refined)
    kept = sorted(
        (item for item in refined if item[1] <= best + params.value_band),
        key=lambda item: item[1],
    )
    clusters: List[Tuple["np.ndarray[Any, Any]", float, float]] = []
    for candidate in kept:
        if all(np.linalg.norm(candidate[0] - other[0]) > params.merge_tolerance for other in clusters):
            clusters.append(candidate)
    clusters.sort(key=lambda item: tuple(item[0]))
    faces: List[Optional[int]] = []
    for minimizer, value, _ in clusters:
        if value <= params.value_band:
            faces.append(None)
            continue
        try:
            faces.append(
                optimizing_face_of(ball, query, minimizer, value, params.face_tolerance).id
            )
        except PointOffSphere:  # pragma: no cover
            faces.append(None)
    log.debug(
        "Distance from %s is %s with %d minimizers", tuple(query), best, len(clusters)
    )
    return DistanceResult(
        point=query,
        value=best,
        minimizers=[tuple(float(c) for c in item[0]) for item in clusters],
        values=[item[1] for item in clusters],
        residuals=[item[2] for item in clusters],
        optimizing_faces=faces,
    )


def _check_off_variety(surface: Hypersurface, point: Sequence[Any], params: OracleParams) -> None:
    if not any(isinstance(coord, float) for coord in point):
        exact = arith.vector(point)
        if surface.value(exact) == 0:
            raise PointOnVariety("The query point lies on the variety", point=exact)
        return
    residual = float(surface.numeric.scaled_residual(np.asarray([point], dtype=float))[0])
    if residual <= params.residual_tolerance:
        raise PointOnVariety(
            "The query point lies on the variety", point=tuple(point), residual=residual
        )


def is_medial_candidate(
    surface: Hypersurface,
    ball: UnitBall,
    point: Sequence[Any],
    params: Optional[OracleParams] = None,
) -> bool:
    """
    Return whether the oracle finds two or more nearest points.

    Raises:
        PointOnVariety: the point lies on ``X``
    """
    if params is None:
        params = OracleParams()
    _check_off_variety(surface, point, params)
    return distance_to_variety(surface, ball, point, params).is_medial


@attr.s(frozen=True, kw_only=True)
class PruneVerdict:
    """
    Pruning outcome for one component.

    Keyword Arguments:
        component:
            The component
        status:
            ``"supported"``, ``"unsupported"``, ``"no real points in box"`` or ``"skipped"``
        witness:
            A sampled medial point realizing the component's face pair
        tested:
            Number of sampled points tested
    """

    component: EquidistantComponent = attr.ib()
    status: str = attr.ib()
    witness: Optional[FloatVector] = attr.ib(default=None)
    tested: int = attr.ib(default=0)


SUPPORTED = "supported"
UNSUPPORTED = "unsupported"
NO_REAL_POINTS = "no real points in box"
SKIPPED = "skipped"


@attr.s(frozen=True, kw_only=True)
class PruneResult:
    verdicts: Tuple[PruneVerdict, ...] = attr.ib(converter=tuple)

    def _with(self, status: str) -> List[EquidistantComponent]:
        return [item.component for item in self.verdicts if item.status == status]

    @property
    def supported(self) -> List[EquidistantComponent]:
        return self._with(SUPPORTED)

    @property
    def unsupported(self) -> List[EquidistantComponent]:
        return self._with(UNSUPPORTED)

    @property
    def no_real_points(self) -> List[EquidistantComponent]:
        return self._with(NO_REAL_POINTS)


def _faces_match(ball: UnitBall, component: EquidistantComponent, result: DistanceResult) -> bool:
    first, second = (ball.face(face_id) for face_id in component.face_pair)
    pairs = [(first, second), (ball.face(first.negation_id), ball.face(second.negation_id))]
    faces = [ball.face(face_id) for face_id in result.optimizing_faces if face_id is not None]
    for left, right in pairs:
        for a, ga in enumerate(faces):
            for b, gb in enumerate(faces):
                if a != b and ga.vertex_ids <= left.vertex_ids and gb.vertex_ids <= right.vertex_ids:
                    return True
    return False


def _square_free(poly: MultiPoly) -> MultiPoly:
    return MultiPoly.from_sympy(poly.as_poly().sqf_part())


def prune_components(
    components: Sequence[EquidistantComponent],
    surface: Hypersurface,
    ball: UnitBall,
    params: Optional[OracleParams] = None,
) -> PruneResult:
    """
    Sort plane curve components into supported and unsupported ones.

    Up to ``prune_samples`` points are sampled on each component's zero set, away from ``X``, on a
    grid whose shift is drawn from ``params.seed``. A component is supported when one of them has
    two nearest points attained on faces contained in the component's face pair, or in the antipodal
    pair.
    """
    if params is None:
        params = OracleParams()
    if surface.dimension != 2:
        raise ValueError("Pruning samples component zero sets and needs a plane curve")
    box = params.box if params.box is not None else Box.around([0.0, 0.0], params.search_radius)
    params = attr.evolve(params, box=box)
    offset = float(np.random.default_rng(params.seed).random())
    verdicts = []
    for component in components:
        if component.poly is None or component.poly.is_constant:
            verdicts.append(PruneVerdict(component=component, status=SKIPPED))
            continue
        numeric = NumericPolynomial.build(_square_free(component.poly))
        found = sampling.zero_set_points(numeric, box, params.prune_grid, offset=offset)
        if len(found):
            away = surface.numeric.scaled_residual(found) > 1e-6
            found = found[away]
        if len(found) == 0:
            verdicts.append(PruneVerdict(component=component, status=NO_REAL_POINTS))
            continue
        tested = 0
        verdict = PruneVerdict(component=component, status=UNSUPPORTED)
        for candidate in sampling.farthest_point_subset(found, params.prune_samples):
            tested += 1
            result = distance_to_variety(surface, ball, candidate, params)
            if result.is_medial and _faces_match(ball, component, result):
                verdict = PruneVerdict(
                    component=component,
                    status=SUPPORTED,
                    witness=tuple(float(c) for c in candidate),
                    tested=tested,
                )
                break
        else:
            verdict = attr.evolve(verdict, tested=tested)
        verdicts.append(verdict)
    result = PruneResult(verdicts=verdicts)
    log.info(
        "Pruning kept %d of %d components", len(result.supported), len(components)
    )
    return result
