# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
#
import functools
import json
import logging
import os
import tempfile
from typing import Any
from typing import Dict
from typing import Optional

import pytest

try:
    from pytest import FixtureRequest
except ImportError:
    from _pytest.fixtures import FixtureRequest

from polyvor import catalog
from polyvor.polynomials import MultiPoly
from polyvor.polytope import UnitBall
from polyvor.polytope import ball_from_functionals
from polyvor.problem import ProblemFile
from polyvor.variety import Hypersurface

log = logging.getLogger(__name__)


class Tempfiles:
    """
    Class which generates temporary problem files and cleans them when done.
    """

    def __init__(self, request: FixtureRequest):
        self.request = request

    def makejsonfile(self, data: Dict[str, Any], prefix: Optional[str] = None) -> str:
        """
        Creates a JSON file and returns it's path.
        """
        tfile = tempfile.NamedTemporaryFile("w", prefix=prefix or "tmp", suffix=".json", delete=False)
        json.dump(data, tfile, indent=2)
        tfile.close()
        self.request.addfinalizer(functools.partial(self._delete_temp_file, tfile.name))
        with open(tfile.name, encoding="utf-8") as rfh:
            log.debug(
                "Created problem file with contents:\n>>>>> %s >>>>>\n%s\n<<<<< %s <<<<<\n",
                tfile.name,
                rfh.read(),
                tfile.name,
            )
        return tfile.name

    def makeproblem(self, problem: ProblemFile, prefix: Optional[str] = None) -> str:
        return self.makejsonfile(problem.to_dict(), prefix=prefix)

    def _delete_temp_file(self, fpath: str) -> None:
        """
        Cleanup the temporary path.
        """
        if os.path.exists(fpath):  # pragma: no branch
            os.unlink(fpath)


@pytest.fixture
def tempfiles(request: FixtureRequest) -> Tempfiles:
    """
    Temporary files fixture.
    """
    return Tempfiles(request)


@pytest.fixture(scope="session")
def square() -> UnitBall:
    return ball_from_functionals(catalog.square_functionals())


@pytest.fixture(scope="session")
def diamond() -> UnitBall:
    return ball_from_functionals(catalog.diamond_functionals())


@pytest.fixture(scope="session")
def cube() -> UnitBall:
    return ball_from_functionals(catalog.cube_functionals())


@pytest.fixture(scope="session")
def octahedron() -> UnitBall:
    return ball_from_functionals(catalog.octahedron_functionals())


def surface(text: str, nvars: int = 2) -> Hypersurface:
    return Hypersurface(poly=MultiPoly.parse(text, nvars))


@pytest.fixture(scope="session")
def parabola() -> Hypersurface:
    return surface("y - x**2")


@pytest.fixture(scope="session")
def circle() -> Hypersurface:
    return surface("x**2 + y**2 - 1")


@pytest.fixture(scope="session")
def ellipse() -> Hypersurface:
    return surface("4*x**2 + y**2 - 4")


@pytest.fixture(scope="session")
def hyperboloid() -> Hypersurface:
    return surface("36*x**2 + 9*y**2 - 4*z**2 - 36", 3)
