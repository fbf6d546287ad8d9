# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
#
import numpy as np
import pytest

from polyvor.customtypes import Box


def test_around() -> None:
    box = Box.around((1, -1), 2)
    assert box.bounds == ((-1.0, 3.0), (-3.0, 1.0))
    assert box.dimension == 2
    assert box.diameter == pytest.approx(4 * np.sqrt(2))


def test_invalid() -> None:
    with pytest.raises(ValueError):
        Box(bounds=[])
    with pytest.raises(ValueError):
        Box(bounds=[(0, 0)])


def test_contains() -> None:
    box = Box(bounds=[(0, 1), (0, 1)])
    points = np.array([[0.5, 0.5], [1.0, 1.0], [1.1, 0.5], [-1e-12, 0.0]])
    assert box.contains(points).tolist() == [True, True, False, False]
    assert box.contains(points, margin=1e-9).tolist() == [True, True, False, True]
    assert box.contains(points, margin=-0.1).tolist() == [True, False, False, False]


def test_grid() -> None:
    box = Box(bounds=[(-1, 1), (0, 2), (0, 1)])
    grid = box.grid(3)
    assert grid.shape == (27, 3)
    assert grid[0].tolist() == [-1.0, 0.0, 0.0]
    assert grid[-1].tolist() == [1.0, 2.0, 1.0]
    assert [0.0, 1.0, 0.5] in grid.tolist()
    assert list(box.iter_axes()) == list(box.bounds)
