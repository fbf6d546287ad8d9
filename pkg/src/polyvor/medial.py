# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Equidistant locus of a hypersurface under a polyhedral norm.

A point ``u`` is equidistant from ``X`` through two faces ``F1`` and ``F2`` of the unit ball when
the scaled ball ``u + lambda * B`` touches ``X`` on ``F1`` and on ``F2`` for the same ``lambda``.
Eliminating ``x`` and ``lambda`` gives polynomials in ``u`` whose zero sets contain the medial
axis. Three face pair classes have closed form eliminations:

* vertex and vertex: the resultant in ``lambda`` of ``f(u + d1 * lambda)`` and
  ``f(u + d2 * lambda)``, divided by ``f(u)``;
* vertex and facet: ``f(u + d * lambda)`` with ``lambda = l(z - u)`` for a point ``z`` of ``X``
  tangent to the facet;
* facet and facet: the hyperplanes ``l1(p - u) == l2(q - u)`` over tangent points ``p`` and ``q``.
"""
import enum
import itertools
import logging
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
import sympy

from polyvor import arith
from polyvor import sampling
from polyvor.config import default_threads
from polyvor.customtypes import Box
from polyvor.customtypes import FloatVector
from polyvor.customtypes import RationalVector
from polyvor.exceptions import FaceNotFound
from polyvor.exceptions import SingularMatrix
from polyvor.polynomials import MultiPoly
from polyvor.polynomials import UniPolyOverU
from polyvor.polynomials import exact_divide
from polyvor.polynomials import normalize
from polyvor.polynomials import polynomial_gcd
from polyvor.polynomials import substitute_line
from polyvor.polynomials import sylvester_resultant
from polyvor.polynomials import variables
from polyvor.polytope import Face
from polyvor.polytope import UnitBall
from polyvor.utils import rationalize_vector
from polyvor.variety import Hypersurface

log = logging.getLogger(__name__)

Interval = Tuple[Fraction, Fraction]


class Provenance(enum.Enum):
    """
    How an equidistant component was obtained.
    """

    VERTEX_VERTEX = "vertex-vertex"
    VERTEX_FACET = "vertex-facet"
    FACET_FACET = "facet-facet"
    OUT_OF_SCOPE = "out-of-scope"


DEGENERATE = "degenerate"
EMPTY = "empty"
NOT_DIVISIBLE = "not-divisible"
POSITIVE_DIMENSIONAL_TANGENCY = "positive-dimensional-tangency"
APPROXIMATE = "approximate"


@attr.s(frozen=True, kw_only=True)
class TangentPoint:
    """
    A point of ``X`` whose gradient is parallel to a facet's functional.

    Keyword Arguments:
        facet_id:
            The facet
        point:
            Exact coordinates, when rational
        approximate:
            Float coordinates
        intervals:
            Isolating intervals per coordinate for irrational points
    """

    facet_id: int = attr.ib()
    approximate: FloatVector = attr.ib(converter=lambda value: tuple(float(c) for c in value))
    point: Optional[RationalVector] = attr.ib(default=None)
    intervals: Optional[Tuple[Interval, ...]] = attr.ib(default=None)

    @property
    def exact(self) -> bool:
        return self.point is not None

    def coordinates(self, denominator_cap: int = 10**12) -> RationalVector:
        """
        Exact coordinates, or a rationalization of the float ones.
        """
        if self.point is not None:
            return self.point
        return rationalize_vector(self.approximate, denominator_cap)


@attr.s(frozen=True, kw_only=True)
class TangentSearch:
    """
    All tangent points of a facet, with the search flags.

    Keyword Arguments:
        facet_id:
            The facet
        points:
            The tangent points found
        positive_dimensional:
            ``X`` has a component along which the gradient stays parallel to the facet functional
        boundary_hits:
            Solutions dropped for lying outside, or converged onto the border of, the search box
    """

    facet_id: int = attr.ib()
    points: Tuple[TangentPoint, ...] = attr.ib(converter=tuple, factory=tuple)
    positive_dimensional: bool = attr.ib(default=False)
    boundary_hits: int = attr.ib(default=0)


@attr.s(frozen=True, kw_only=True)
class EquidistantComponent:
    """
    A polynomial in ``u`` whose zero set contains one component of the equidistant locus.

    Keyword Arguments:
        poly:
            The normalized polynomial, absent when the resultant vanishes identically or the pair is
            out of scope
        face_pair:
            The two face ids
        provenance:
            The elimination that produced the polynomial
        degree_bound:
            Degree bound from the elimination
        zero_resultant_flag:
            The elimination is identically zero; the pair is a full dimensional component candidate
        raw_degree:
            Degree before dividing out ``f(u)``, for vertex pairs
        tangent_points:
            Tangent points used
        functional_ids:
            For each vertex of the pair, the functionals selected for its direction
        annotations:
            Free form markers such as ``"degenerate"``
    """

    poly: Optional[MultiPoly] = attr.ib()
    face_pair: Tuple[int, int] = attr.ib(converter=tuple)
    provenance: Provenance = attr.ib()
    degree_bound: Optional[int] = attr.ib()
    zero_resultant_flag: bool = attr.ib(default=False)
    raw_degree: Optional[int] = attr.ib(default=None)
    tangent_points: Tuple[TangentPoint, ...] = attr.ib(converter=tuple, factory=tuple)
    functional_ids: Tuple[Tuple[int, ...], ...] = attr.ib(converter=tuple, factory=tuple)
    annotations: Tuple[str, ...] = attr.ib(converter=tuple, factory=tuple)

    @property
    def degree(self) -> Optional[int]:
        return None if self.poly is None else self.poly.degree

    @property
    def exact(self) -> bool:
        return APPROXIMATE not in self.annotations

    @property
    def within_bound(self) -> bool:
        if self.poly is None or self.degree_bound is None:
            return True
        return self.poly.degree <= self.degree_bound


@attr.s(frozen=True, kw_only=True)
class DegreeEntry:
    face_pair: Tuple[int, int] = attr.ib(converter=tuple)
    provenance: Provenance = attr.ib()
    degree: int = attr.ib()
    bound: int = attr.ib()

    @property
    def satisfied(self) -> bool:
        return self.degree <= self.bound


def _require_vertex(face: Face) -> None:
    if face.dim != 0:
        raise FaceNotFound(f"Face {face.id} of dimension {face.dim} is not a vertex")


def _require_facet(ball: UnitBall, face: Face) -> None:
    if face.dim != ball.dimension - 1:
        raise FaceNotFound(f"Face {face.id} of dimension {face.dim} is not a facet")


def vertex_frame(ball: UnitBall, vertex: Face) -> Tuple[RationalVector, Tuple[int, ...]]:
    """
    Return ``A^-1 1`` and the functional ids stacked in ``A``.

    ``A`` takes ``n`` linearly independent active functionals of the vertex, chosen greedily in
    functional id order.
    """
    _require_vertex(vertex)
    chosen: List[int] = []
    rows: List[RationalVector] = []
    for idx in sorted(vertex.active_functional_ids):
        candidate = rows + [ball.functionals[idx]]
        if arith.rank_of_vectors(candidate) == len(candidate):
            chosen.append(idx)
            rows = candidate
        if len(rows) == ball.dimension:
            break
    if len(rows) < ball.dimension:
        raise SingularMatrix(
            f"The active functionals of vertex {vertex.id} span only {len(rows)} dimensions"
        )
    matrix = arith.RationalMatrix(rows=rows)
    direction = arith.matrix_inverse(matrix).apply([Fraction(1)] * ball.dimension)
    return direction, tuple(chosen)


def vertex_direction(ball: UnitBall, vertex: Face) -> RationalVector:
    """
    Return ``A^-1 1`` for the vertex; it equals the vertex coordinates.
    """
    return vertex_frame(ball, vertex)[0]


def vertex_vertex_component(
    surface: Hypersurface, ball: UnitBall, first: Face, second: Face
) -> EquidistantComponent:
    """
    Return ``res(f(u + d1 lambda), f(u + d2 lambda)) / f(u)`` for two vertices.
    """
    first_direction, first_ids = vertex_frame(ball, first)
    second_direction, second_ids = vertex_frame(ball, second)
    degree = surface.degree
    common: Dict[str, Any] = dict(
        face_pair=(first.id, second.id),
        provenance=Provenance.VERTEX_VERTEX,
        degree_bound=degree * degree - degree,
        functional_ids=(first_ids, second_ids),
    )
    resultant = sylvester_resultant(
        substitute_line(surface.poly, first_direction),
        substitute_line(surface.poly, second_direction),
    )
    if resultant.is_zero:
        log.warning("The resultant of vertices %d and %d vanishes identically", first.id, second.id)
        return EquidistantComponent(poly=None, zero_resultant_flag=True, **common)
    quotient = exact_divide(resultant, surface.poly)
    annotations = []
    if quotient is None:
        log.warning(
            "The resultant of vertices %d and %d is not divisible by f(u)", first.id, second.id
        )
        quotient = resultant
        annotations.append(NOT_DIVISIBLE)
    if quotient.is_constant:
        annotations.append(EMPTY)
    return EquidistantComponent(
        poly=normalize(quotient),
        raw_degree=resultant.degree,
        annotations=annotations,
        **common,
    )


def _facet_functional(ball: UnitBall, facet: Face) -> RationalVector:
    _require_facet(ball, facet)
    (idx,) = facet.active_functional_ids
    return ball.functionals[idx]


def _tangency_minor(surface: Hypersurface, functional: RationalVector) -> MultiPoly:
    fx, fy = surface.gradient
    return fx.scale(functional[1]) - fy.scale(functional[0])


def _real_roots(poly: sympy.Poly, eps: Fraction) -> List[Tuple[Optional[Fraction], Interval]]:
    """
    Real roots of a univariate rational polynomial: exact rationals, or isolating intervals.
    """
    roots: List[Tuple[Optional[Fraction], Interval]] = []
    if poly.is_zero or poly.degree() <= 0:
        return roots
    _, factors = poly.factor_list()
    for factor, _ in factors:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            value = sympy.Rational(-b, a)
            root = Fraction(int(value.p), int(value.q))
            roots.append((root, (root, root)))
            continue
        for (low, high), _ in factor.intervals(eps=sympy.Rational(eps.numerator, eps.denominator)):
            roots.append(
                (None, (Fraction(int(low.p), int(low.q)), Fraction(int(high.p), int(high.q))))
            )
    roots.sort(key=lambda item: item[1][0])
    return roots


def _plane_tangent_points(
    surface: Hypersurface, facet: Face, functional: RationalVector
) -> TangentSearch:
    minor = _tangency_minor(surface, functional)
    if minor.is_zero or not polynomial_gcd(surface.poly, minor).is_constant:
        log.warning(
            "The curve has a component along which it is parallel to facet %d", facet.id
        )
        return TangentSearch(facet_id=facet.id, positive_dimensional=True)
    x1, x2 = variables(2, "x")
    curve = surface.poly.as_expr("x")
    condition = minor.as_expr("x")
    eliminated = sympy.Poly(sympy.resultant(curve, condition, x2), x1, domain=sympy.QQ)
    points: List[TangentPoint] = []
    eps = Fraction(1, 10**15)
    for root, interval in _real_roots(eliminated, eps):
        if root is not None:
            value = sympy.Rational(root.numerator, root.denominator)
            on_line = sympy.gcd(
                sympy.Poly(curve.subs(x1, value), x2, domain=sympy.QQ),
                sympy.Poly(condition.subs(x1, value), x2, domain=sympy.QQ),
            )
            for second, second_interval in _real_roots(on_line, eps):
                if second is not None:
                    exact = (root, second)
                    points.append(
                        TangentPoint(facet_id=facet.id, approximate=exact, point=exact)
                    )
                else:
                    middle = float((second_interval[0] + second_interval[1]) / 2)
                    points.append(
                        TangentPoint(
                            facet_id=facet.id,
                            approximate=(float(root), middle),
                            intervals=((root, root), second_interval),
                        )
                    )
            continue
        first = float((interval[0] + interval[1]) / 2)
        coefficients = [
            float(sympy.Poly(coeff, x1).eval(sympy.Float(first, 30)))
            for coeff in sympy.Poly(curve, x2).all_coeffs()
        ]
        seconds: List[float] = []
        for candidate in np.roots(coefficients) if len(coefficients) > 1 else []:
            if abs(candidate.imag) > 1e-7:
                continue
            second = float(candidate.real)
            # A tangency is a double root in x2, which np.roots splits into a close pair.
            if any(abs(second - other) < 1e-6 for other in seconds):
                continue
            seconds.append(second)
            residual = abs(float(condition.subs({x1: first, x2: second})))
            if residual > 1e-6 * (1 + abs(first) + abs(second)) ** surface.degree:
                continue
            points.append(
                TangentPoint(
                    facet_id=facet.id,
                    approximate=(first, second),
                    intervals=(interval, rationalize_vector([second - 1e-9, second + 1e-9], 10**12)),
                )
            )
    return TangentSearch(facet_id=facet.id, points=points)


def _numeric_tangent_points(
    surface: Hypersurface, facet: Face, functional: RationalVector, box: Box, per_axis: int
) -> TangentSearch:
    normal = [[float(c) for c in functional]]
    projected, residuals = sampling.stratum_project(surface.numeric, normal, box.grid(per_axis))
    converged = projected[residuals <= 1e-10]
    inside = box.contains(converged, margin=-1e-9 * box.diameter)
    boundary_hits = int((~inside).sum())
    found = sampling.dedupe(converged[inside], 1e-6)
    points = []
    for approximate in found:
        rational = rationalize_vector(approximate, 10**6)
        grad = surface.gradient_at(rational)
        if (
            surface.value(rational) == 0
            and not arith.is_zero(grad)
            and arith.rank_of_vectors([grad, functional]) == 1
        ):
            points.append(TangentPoint(facet_id=facet.id, approximate=rational, point=rational))
        else:
            points.append(TangentPoint(facet_id=facet.id, approximate=approximate))
    if boundary_hits:
        log.warning(
            "%d tangent point candidates of facet %d left the search box %s",
            boundary_hits,
            facet.id,
            box.bounds,
        )
    points.sort(key=lambda item: item.approximate)
    return TangentSearch(facet_id=facet.id, points=points, boundary_hits=boundary_hits)


def facet_tangency(
    surface: Hypersurface,
    ball: UnitBall,
    facet: Face,
    search_box: Optional[Box] = None,
    per_axis: int = 15,
) -> TangentSearch:
    """
    Find the real points of ``X`` whose gradient is parallel to the facet's functional.

    Plane curves are solved exactly through the resultant of ``f`` and the Jacobian minor
    ``f_x l_y - f_y l_x``; rational roots are exact and irrational ones carry isolating intervals.
    A ``search_box`` only filters the exact solutions. In higher dimensions the points are found by
    Gauss-Newton from a grid over ``search_box`` and are exact when their rationalization checks
    out exactly.
    """
    functional = _facet_functional(ball, facet)
    if surface.dimension == 2:
        search = _plane_tangent_points(surface, facet, functional)
        if search_box is None:
            return search
        mask = search_box.contains(np.asarray([p.approximate for p in search.points]).reshape(-1, 2))
        kept = [point for point, keep in zip(search.points, mask) if keep]
        return attr.evolve(
            search, points=kept, boundary_hits=search.boundary_hits + len(search.points) - len(kept)
        )
    if search_box is None:
        search_box = Box.around([0.0] * surface.dimension, 4.0)
    return _numeric_tangent_points(surface, facet, functional, search_box, per_axis)


def tangent_points_to_facet(
    surface: Hypersurface, ball: UnitBall, facet: Face, search_box: Optional[Box] = None
) -> List[TangentPoint]:
    """
    Return the tangent points of the facet; see :py:func:`facet_tangency`.
    """
    return list(facet_tangency(surface, ball, facet, search_box).points)


def vertex_facet_component(
    surface: Hypersurface, ball: UnitBall, vertex: Face, facet: Face, tangent: TangentPoint
) -> EquidistantComponent:
    """
    Return the resultant in ``lambda`` of ``f(u + d lambda)`` and ``l(z - u) - lambda``, which is
    ``f(u + d l(z - u))`` up to sign.
    """
    direction, ids = vertex_frame(ball, vertex)
    functional = _facet_functional(ball, facet)
    nvars = surface.dimension
    z = tangent.coordinates()
    line = UniPolyOverU(
        nvars=nvars,
        coefficients=[
            MultiPoly.linear(arith.neg(functional), arith.dot(functional, z)),
            MultiPoly.constant(-1, nvars),
        ],
    )
    resultant = sylvester_resultant(substitute_line(surface.poly, direction), line)
    annotations = []
    if not tangent.exact:
        annotations.append(APPROXIMATE)
    if facet.active_functional_ids <= vertex.active_functional_ids:
        annotations.append(DEGENERATE)
    common: Dict[str, Any] = dict(
        face_pair=(vertex.id, facet.id),
        provenance=Provenance.VERTEX_FACET,
        degree_bound=surface.degree,
        tangent_points=(tangent,),
        functional_ids=(ids,),
    )
    if resultant.is_zero:
        return EquidistantComponent(
            poly=None, zero_resultant_flag=True, annotations=annotations, **common
        )
    if resultant.is_constant:
        annotations.append(EMPTY)
    return EquidistantComponent(
        poly=normalize(resultant), raw_degree=resultant.degree, annotations=annotations, **common
    )


def _positive_dimensional_component(
    first: Face, second: Face, provenance: Provenance, bound: Optional[int]
) -> EquidistantComponent:
    return EquidistantComponent(
        poly=None,
        face_pair=(first.id, second.id),
        provenance=provenance,
        degree_bound=bound,
        zero_resultant_flag=True,
        annotations=(POSITIVE_DIMENSIONAL_TANGENCY,),
    )


def facet_facet_components(
    surface: Hypersurface,
    ball: UnitBall,
    first: Face,
    second: Face,
    search_box: Optional[Box] = None,
    tangencies: Optional[Dict[int, TangentSearch]] = None,
) -> List[EquidistantComponent]:
    """
    Return one hyperplane ``l1(p - u) - l2(q - u)`` per pair of tangent points ``p`` of the first
    facet and ``q`` of the second.
    """
    tangencies = tangencies if tangencies is not None else {}
    searches = []
    for facet in (first, second):
        if facet.id not in tangencies:
            tangencies[facet.id] = facet_tangency(surface, ball, facet, search_box)
        searches.append(tangencies[facet.id])
    if any(search.positive_dimensional for search in searches):
        return [_positive_dimensional_component(first, second, Provenance.FACET_FACET, 1)]
    first_functional = _facet_functional(ball, first)
    second_functional = _facet_functional(ball, second)
    components = []
    for p, q in itertools.product(searches[0].points, searches[1].points):
        p_exact = p.coordinates()
        q_exact = q.coordinates()
        poly = MultiPoly.linear(
            arith.sub(second_functional, first_functional),
            arith.dot(first_functional, p_exact) - arith.dot(second_functional, q_exact),
        )
        annotations = [] if p.exact and q.exact else [APPROXIMATE]
        if poly.is_constant:
            annotations.append(EMPTY)
        components.append(
            EquidistantComponent(
                poly=normalize(poly),
                face_pair=(first.id, second.id),
                provenance=Provenance.FACET_FACET,
                degree_bound=1,
                raw_degree=poly.degree,
                tangent_points=(p, q),
                annotations=annotations,
            )
        )
    return components


def _pair_components(
    surface: Hypersurface,
    ball: UnitBall,
    first: Face,
    second: Face,
    tangencies: Dict[int, TangentSearch],
    search_box: Optional[Box],
) -> List[EquidistantComponent]:
    top = ball.dimension - 1
    if first.dim == 0 and second.dim == 0:
        return [vertex_vertex_component(surface, ball, first, second)]
    if first.dim == top and second.dim == top:
        return facet_facet_components(surface, ball, first, second, search_box, tangencies)
    if {first.dim, second.dim} == {0, top}:
        vertex, facet = (first, second) if first.dim == 0 else (second, first)
        search = tangencies[facet.id]
        if search.positive_dimensional:
            return [
                _positive_dimensional_component(
                    vertex, facet, Provenance.VERTEX_FACET, surface.degree
                )
            ]
        return [
            vertex_facet_component(surface, ball, vertex, facet, tangent)
            for tangent in search.points
        ]
    log.warning(
        "Face pair (%d, %d) of dimensions (%d, %d) has no closed form elimination",
        first.id,
        second.id,
        first.dim,
        second.dim,
    )
    return [
        EquidistantComponent(
            poly=None,
            face_pair=(first.id, second.id),
            provenance=Provenance.OUT_OF_SCOPE,
            degree_bound=None,
        )
    ]


def equidistant_locus(
    surface: Hypersurface,
    ball: UnitBall,
    search_box: Optional[Box] = None,
    threads: Optional[int] = None,
) -> List[EquidistantComponent]:
    """
    Return the equidistant components over every unordered pair of distinct faces.

    Plane curves are covered completely. In higher dimensions pairs involving a face which is
    neither a vertex nor a facet are reported as out of scope entries. Regular components come
    first, then full dimensional candidates, then out of scope pairs, each in face pair order.
    """
    if ball.dimension != surface.dimension:
        raise ValueError("The ball and the hypersurface live in different dimensions")
    top = ball.dimension - 1
    tangencies = {
        face.id: facet_tangency(surface, ball, face, search_box)
        for face in ball.faces
        if face.dim == top
    }
    pairs = list(itertools.combinations(ball.faces, 2))
    with ThreadPoolExecutor(max_workers=threads or default_threads()) as executor:
        results = list(
            executor.map(
                lambda pair: _pair_components(surface, ball, pair[0], pair[1], tangencies, search_box),
                pairs,
            )
        )
    components = [component for result in results for component in result]

    def rank(component: EquidistantComponent) -> int:
        if component.provenance is Provenance.OUT_OF_SCOPE:
            return 2
        return 1 if component.zero_resultant_flag else 0

    components.sort(key=rank)
    log.info(
        "Computed %d equidistant components over %d face pairs",
        sum(1 for item in components if item.poly is not None),
        len(pairs),
    )
    return components


def full_dimensional_candidates(components: Sequence[EquidistantComponent]) -> List[EquidistantComponent]:
    return [item for item in components if item.zero_resultant_flag]


def out_of_scope_pairs(components: Sequence[EquidistantComponent]) -> List[EquidistantComponent]:
    return [item for item in components if item.provenance is Provenance.OUT_OF_SCOPE]


def degree_report(components: Sequence[EquidistantComponent]) -> List[DegreeEntry]:
    """
    Degree against bound for every component with a polynomial.
    """
    return [
        DegreeEntry(
            face_pair=item.face_pair,
            provenance=item.provenance,
            degree=item.poly.degree,
            bound=item.degree_bound,
        )
        for item in components
        if item.poly is not None and item.degree_bound is not None
    ]


def facet_family_sizes(
    components: Sequence[EquidistantComponent],
) -> Dict[Tuple[int, int], Tuple[int, int]]:
    """
    For every facet pair, the number of hyperplanes and the bound ``s * t``.
    """
    counts: Dict[Tuple[int, int], int] = {}
    for item in components:
        if item.provenance is Provenance.FACET_FACET and item.poly is not None:
            counts[item.face_pair] = counts.get(item.face_pair, 0) + 1
    sizes = {}
    for pair, count in counts.items():
        points = {item.tangent_points for item in components if item.face_pair == pair}
        firsts = {tp[0] for tp in points}
        seconds = {tp[1] for tp in points}
        sizes[pair] = (count, len(firsts) * len(seconds))
    return sizes


def quadratic_degree_check(
    surface: Hypersurface,
    ball: UnitBall,
    components: Optional[Sequence[EquidistantComponent]] = None,
) -> List[DegreeEntry]:
    """
    For a quadric, report every component degree and raw elimination degree against the bound 4.
    """
    if surface.degree != 2:
        raise ValueError(f"The quadric check needs a degree 2 polynomial, got degree {surface.degree}")
    if components is None:
        components = equidistant_locus(surface, ball)
    entries = []
    for item in components:
        if item.poly is None:
            continue
        degree = max(item.poly.degree, item.raw_degree if item.raw_degree is not None else -1)
        entries.append(
            DegreeEntry(face_pair=item.face_pair, provenance=item.provenance, degree=degree, bound=4)
        )
    return entries
