# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Floating point sampling of hypersurfaces and plane curves.

Everything here works on ``(N, n)`` numpy arrays of points, one point per row.
"""
import logging
from typing import List
from typing import Sequence
from typing import Tuple

import numpy as np
import numpy.typing as npt
from scipy.spatial import cKDTree

from polyvor.customtypes import Box
from polyvor.polynomials import NumericPolynomial

log = logging.getLogger(__name__)

Array = npt.NDArray[np.float64]
Segment = Tuple[Tuple[float, float], Tuple[float, float]]
GOLDEN_RATIO = (1 + 5**0.5) / 2


def newton_project(
    numeric: NumericPolynomial,
    points: Array,
    iterations: int = 50,
    tolerance: float = 1e-12,
) -> Tuple[Array, Array]:
    """
    Project points onto ``f = 0`` with minimum norm Newton steps ``x - f(x) grad f(x) / |grad f(x)|^2``.

    Returns:
        The projected points and their scaled residuals. Points which diverge get an infinite
        residual.
    """
    current = np.array(points, dtype=float, copy=True)
    active = np.ones(len(current), dtype=bool)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(iterations):
            if not active.any():
                break
            index = np.flatnonzero(active)
            subset = current[index]
            values = numeric.value(subset)
            grads = numeric.gradient(subset)
            norms = np.einsum("ij,ij->i", grads, grads)
            usable = np.isfinite(values) & np.isfinite(norms) & (norms > 1e-300)
            steps = np.zeros_like(subset)
            steps[usable] = (values[usable] / norms[usable])[:, None] * grads[usable]
            current[index] = subset - steps
            finished = (np.linalg.norm(steps, axis=1) < tolerance) | ~usable
            active[index[finished]] = False
        residuals = numeric.scaled_residual(current)
    residuals = np.where(np.isfinite(residuals) & np.all(np.isfinite(current), axis=1), residuals, np.inf)
    return current, residuals


def stratum_project(
    numeric: NumericPolynomial,
    normals: Sequence[Sequence[float]],
    points: Array,
    iterations: int = 50,
    tolerance: float = 1e-12,
) -> Tuple[Array, Array]:
    """
    Gauss-Newton projection onto ``{f = 0, grad f in span(normals)}``.

    The span condition is written as ``P grad f = 0`` with ``P`` the orthogonal projector onto the
    complement of the span, so the residual is ``(f, P grad f)`` with Jacobian ``(grad f, P Hess f)``.

    Returns:
        The projected points and the residual norms, relative to ``1 + |grad f|``.
    """
    basis, _ = np.linalg.qr(np.asarray(normals, dtype=float).T)
    projector = np.eye(numeric.nvars) - basis @ basis.T
    current = np.array(points, dtype=float, copy=True)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(iterations):
            values = numeric.value(current)
            grads = numeric.gradient(current)
            hessians = numeric.hessian(current)
            residual = np.concatenate([values[:, None], grads @ projector.T], axis=1)
            jacobian = np.concatenate(
                [grads[:, None, :], np.einsum("ij,njk->nik", projector, hessians)], axis=1
            )
            finite = np.all(np.isfinite(residual), axis=1) & np.all(np.isfinite(jacobian), axis=(1, 2))
            if not finite.any():
                break
            steps = np.zeros_like(current)
            steps[finite] = np.einsum(
                "nij,nj->ni", np.linalg.pinv(jacobian[finite]), residual[finite]
            )
            current = current - steps
            if np.all(np.linalg.norm(steps[finite], axis=1) < tolerance):
                break
        grads = numeric.gradient(current)
        residual = np.concatenate(
            [numeric.value(current)[:, None], grads @ projector.T], axis=1
        )
        norms = np.linalg.norm(residual, axis=1) / (1.0 + np.linalg.norm(grads, axis=1))
    norms = np.where(np.isfinite(norms), norms, np.inf)
    return current, norms


def dedupe(points: Array, tolerance: float) -> Array:
    """
    Drop points closer than ``tolerance`` to an earlier point, keeping input order.
    """
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return points
    tree = cKDTree(points)
    removed = np.zeros(len(points), dtype=bool)
    keep = []
    for idx in range(len(points)):
        if removed[idx]:
            continue
        keep.append(idx)
        for other in tree.query_ball_point(points[idx], tolerance):
            removed[other] = True
    return points[keep]


def points_on_variety(
    numeric: NumericPolynomial,
    box: Box,
    per_axis: int,
    iterations: int = 50,
    tolerance: float = 1e-12,
    residual_tolerance: float = 1e-10,
    merge_tolerance: float = 0.0,
) -> Array:
    """
    Seed a regular grid over ``box``, project every node onto ``f = 0`` and keep the converged
    points inside the box.
    """
    projected, residuals = newton_project(numeric, box.grid(per_axis), iterations, tolerance)
    keep = (residuals <= residual_tolerance) & box.contains(projected)
    found = projected[keep]
    if merge_tolerance > 0:
        found = dedupe(found, merge_tolerance)
    log.debug("Projected %d grid nodes onto %d variety points", per_axis**box.dimension, len(found))
    return found


def farthest_point_subset(points: Array, count: int) -> Array:
    """
    Greedy farthest point subsample, started from the lexicographically smallest point.
    """
    points = np.asarray(points, dtype=float)
    if len(points) <= count:
        return points
    order = np.lexsort(points.T[::-1])
    chosen = [int(order[0])]
    distances = np.linalg.norm(points - points[chosen[0]], axis=1)
    while len(chosen) < count:
        nxt = int(np.argmax(distances))
        chosen.append(nxt)
        distances = np.minimum(distances, np.linalg.norm(points - points[nxt], axis=1))
    return points[sorted(chosen)]


def _offset_axes(box: Box, cells: int, offset: float) -> List[Array]:
    # Axis k is shifted by frac(offset * phi**k) cells, so no two axes share a shift.
    axes = []
    for index, (low, high) in enumerate(box.iter_axes()):
        width = (high - low) / cells
        shift = (offset * GOLDEN_RATIO**index) % 1.0
        axes.append(np.linspace(low, high, cells + 1) + shift * width)
    return axes


def zero_set_points(
    numeric: NumericPolynomial,
    box: Box,
    cells: int = 96,
    offset: float = 0.1234,
    bisections: int = 60,
) -> Array:
    """
    Locate points of a plane curve by sign changes along the edges of a shifted grid.

    Each sign change is refined by bisection along its edge. The grid is shifted by a fraction of
    a cell, by a different amount on each axis, so that curves through rational grid coordinates
    and the diagonals are crossed transversally. Nodes where the polynomial vanishes exactly are
    returned as they are. Even multiplicity components have no sign change; pass a square free
    polynomial.
    """
    xs, ys = _offset_axes(box, cells, offset)
    grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.stack([grid_x.ravel(), grid_y.ravel()], axis=1)
    values = numeric.value(nodes).reshape(grid_x.shape)
    zeros = nodes[values.ravel() == 0]
    starts: List[Array] = []
    ends: List[Array] = []
    for axis in (0, 1):
        if axis == 0:
            left, right = values[:-1, :], values[1:, :]
            a = np.stack([grid_x[:-1, :], grid_y[:-1, :]], axis=-1)
            b = np.stack([grid_x[1:, :], grid_y[1:, :]], axis=-1)
        else:
            left, right = values[:, :-1], values[:, 1:]
            a = np.stack([grid_x[:, :-1], grid_y[:, :-1]], axis=-1)
            b = np.stack([grid_x[:, 1:], grid_y[:, 1:]], axis=-1)
        crossing = np.sign(left) * np.sign(right) < 0
        starts.append(a[crossing])
        ends.append(b[crossing])
    low = np.concatenate(starts) if starts else np.zeros((0, 2))
    high = np.concatenate(ends) if ends else np.zeros((0, 2))
    if len(low) == 0:
        return zeros[box.contains(zeros)] if len(zeros) else np.zeros((0, 2))
    low_values = numeric.value(low)
    for _ in range(bisections):
        middle = (low + high) / 2
        middle_values = numeric.value(middle)
        same = np.sign(middle_values) == np.sign(low_values)
        low = np.where(same[:, None], middle, low)
        low_values = np.where(same, middle_values, low_values)
        high = np.where(same[:, None], high, middle)
    found = np.concatenate([zeros, (low + high) / 2])
    return found[box.contains(found)]


def contour_segments(numeric: NumericPolynomial, box: Box, cells: int = 96) -> List[Segment]:
    """
    Marching squares polyline segments of a plane curve, in deterministic cell order.
    """
    xs, ys = _offset_axes(box, cells, 0.0)
    grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
    values = numeric.value(np.stack([grid_x.ravel(), grid_y.ravel()], axis=1)).reshape(grid_x.shape)
    segments: List[Segment] = []

    def crossing(p: Tuple[float, float], q: Tuple[float, float], vp: float, vq: float) -> Tuple[float, float]:
        weight = vp / (vp - vq)
        return (p[0] + weight * (q[0] - p[0]), p[1] + weight * (q[1] - p[1]))

    for i in range(cells):
        for j in range(cells):
            corners = [
                ((xs[i], ys[j]), values[i, j]),
                ((xs[i + 1], ys[j]), values[i + 1, j]),
                ((xs[i + 1], ys[j + 1]), values[i + 1, j + 1]),
                ((xs[i], ys[j + 1]), values[i, j + 1]),
            ]
            points = []
            for (p, vp), (q, vq) in zip(corners, corners[1:] + corners[:1]):
                if (vp < 0) != (vq < 0):
                    points.append(crossing(p, q, vp, vq))
            if len(points) == 2:
                segments.append((points[0], points[1]))
            elif len(points) == 4:
                center = float(
                    numeric.value(np.array([[(xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2]]))[0]
                )
                if (center < 0) == (corners[0][1] < 0):
                    segments.extend([(points[0], points[1]), (points[2], points[3])])
                else:
                    segments.extend([(points[0], points[3]), (points[1], points[2])])
    return segments
