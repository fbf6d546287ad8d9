# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Test sampling and classification of hypersurface points.
"""
from fractions import Fraction

import numpy as np
import pytest

from polyvor import sampling
from polyvor import variety
from polyvor.config import SamplingParams
from polyvor.customtypes import Box
from polyvor.exceptions import NoVarietyPoints
from polyvor.polynomials import MultiPoly
from polyvor.polynomials import NumericPolynomial
from polyvor.polytope import UnitBall
from polyvor.variety import Hypersurface
from polyvor.variety import SampleLabel


@pytest.fixture(scope="module")
def params() -> SamplingParams:
    return SamplingParams(threads=2)


def near_any(point, targets, tolerance: float = 1e-3) -> bool:
    return min(np.linalg.norm(np.asarray(point) - np.asarray(target)) for target in targets) < tolerance


def test_circle_strata(square: UnitBall, circle: Hypersurface, params: SamplingParams) -> None:
    labels = variety.sample_and_classify(circle, square, Box.around((0, 0), 2), count=400, seed=0, params=params)
    assert 200 <= len(labels) <= 500
    histogram = variety.stratum_histogram(labels)
    assert set(histogram) <= {"0", "1"}
    assert histogram["1"] > histogram.get("0", 0)
    axis_points = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    zeros = [label for label in labels if label.exact_index == 0]
    assert zeros
    for label in zeros:
        assert near_any(label.point, axis_points)
    for target in axis_points:
        assert any(near_any(label.point, [target]) for label in zeros), target
    assert all(not label.singular for label in labels)


def test_sampling_is_deterministic(square: UnitBall, circle: Hypersurface, params: SamplingParams) -> None:
    box = Box.around((0, 0), 2)
    first = variety.sample_and_classify(circle, square, box, count=120, seed=7, params=params)
    second = variety.sample_and_classify(circle, square, box, count=120, seed=7, params=params)
    assert first == second


def test_hyperboloid_strata(cube: UnitBall, hyperboloid: Hypersurface, params: SamplingParams) -> None:
    labels = variety.sample_and_classify(hyperboloid, cube, Box.around((0, 0, 0), 3), count=300, params=params)
    facet_points = [(1, 0, 0), (-1, 0, 0), (0, 2, 0), (0, -2, 0)]
    zeros = [label for label in labels if label.exact_index == 0]
    assert zeros
    for label in zeros:
        assert near_any(label.point, facet_points)


def test_empty_box(square: UnitBall, circle: Hypersurface, params: SamplingParams) -> None:
    with pytest.raises(NoVarietyPoints):
        variety.sample_and_classify(circle, square, Box.around((10, 10), 1), count=50, params=params)


def test_box_dimension(square: UnitBall, circle: Hypersurface, params: SamplingParams) -> None:
    with pytest.raises(ValueError):
        variety.sample_and_classify(circle, square, Box.around((0, 0, 0), 1), count=50, params=params)


def test_classify_sample(square: UnitBall, circle: Hypersurface, params: SamplingParams) -> None:
    on_axis = variety.classify_sample(circle, square, (1.0, 1e-12), params)
    assert on_axis.rational_point == (Fraction(1), Fraction(0))
    assert on_axis.exact_index == 0
    assert on_axis.advisory_index == 0
    assert not on_axis.near_boundary
    generic = variety.classify_sample(circle, square, (0.6, 0.8), params)
    assert generic.exact_index == 1
    assert generic.rational_point == (Fraction(3, 5), Fraction(4, 5))


def test_singular_sample(square: UnitBall, params: SamplingParams) -> None:
    cusp = Hypersurface(poly=MultiPoly.parse("y**2 - x**3", 2))
    label = variety.classify_sample(cusp, square, (0.0, 0.0), params)
    assert label.singular
    assert label.exact_index is None
    assert variety.stratum_histogram([label]) == {"singular": 1}


def make_label(point, index) -> SampleLabel:
    return SampleLabel(
        point=point,
        rational_point=(),
        exact_index=index,
        face_id=None,
        advisory_index=index,
    )


def test_closure_anomalies() -> None:
    labels = [
        make_label((1.0, 0.0), 0),
        make_label((0.99, 0.1), 1),
        make_label((0.0, 1.0), 0),
        make_label((0.5, 0.5), 1),
    ]
    anomalies = variety.closure_anomalies(labels, radius=0.25)
    assert [anomaly.point for anomaly in anomalies] == [(0.0, 1.0)]
    assert anomalies[0].index == 0
    assert anomalies[0].nearest == pytest.approx(np.hypot(0.5, 0.5))
    assert variety.closure_anomalies(labels, radius=1.0) == []


def test_closure_anomalies_without_upper_stratum() -> None:
    anomalies = variety.closure_anomalies([make_label((1.0, 0.0), 0)], radius=0.5)
    assert len(anomalies) == 1
    assert anomalies[0].nearest == float("inf")


def test_stratum_seeds(square: UnitBall, circle: Hypersurface, params: SamplingParams) -> None:
    angles = np.array([0.3, 2.0, 3.5, 5.5])
    starts = np.column_stack([np.cos(angles), np.sin(angles)])
    groups = variety.stratum_seeds(circle, square, Box.around((0, 0), 2), starts, params)
    assert len(groups) == 1
    (edge_points,) = groups
    assert len(edge_points)
    for point in edge_points:
        assert near_any(point, [(1, 0), (-1, 0), (0, 1), (0, -1)], tolerance=1e-6)


@pytest.mark.parametrize("text", ["x - y", "x + y", "x - y + 2"])
def test_zero_set_points_on_diagonals(text: str) -> None:
    numeric = NumericPolynomial.build(MultiPoly.parse(text, 2))
    box = Box.around((0, 0), 4)
    points = sampling.zero_set_points(numeric, box, cells=96)
    assert len(points) >= 96
    assert np.all(np.abs(numeric.value(points)) < 1e-9)
    assert np.all(box.contains(points))


def test_zero_set_points_exact_nodes() -> None:
    numeric = NumericPolynomial.build(MultiPoly.parse("x - y", 2))
    points = sampling.zero_set_points(numeric, Box.around((0, 0), 4), cells=8, offset=0.0)
    assert sorted(map(tuple, points)) == [(float(c), float(c)) for c in range(-4, 5)]
