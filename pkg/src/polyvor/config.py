# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Parameter records for the floating point parts of polyvor.

Every tolerance and density used by the distance oracle and the stratification sampler lives in
one of these records; there are no hidden constants.
"""
import logging
import os
from typing import Any
from typing import Dict
from typing import Mapping
from typing import Optional

import attr

from polyvor.customtypes import Box
from polyvor.exceptions import ProblemFileError

log = logging.getLogger(__name__)

THREADS_ENVVAR = "POLYVOR_THREADS"


def default_threads() -> int:
    """
    Return the worker thread cap, read from ``POLYVOR_THREADS`` or the hardware count.
    """
    hardware = os.cpu_count() or 1
    value = os.environ.get(THREADS_ENVVAR)
    if value is None:
        return hardware
    try:
        threads = int(value)
    except ValueError:
        threads = 0
    if threads < 1:
        log.warning(
            "Ignoring invalid %s=%r, using %d worker threads", THREADS_ENVVAR, value, hardware
        )
        return hardware
    return threads


def _positive(instance: Any, attribute: "attr.Attribute[Any]", value: Any) -> None:
    if value is not None and value <= 0:
        raise ValueError(f"{attribute.name} must be positive, got {value!r}")


def _optional_box(value: Any) -> Optional[Box]:
    if value is None or isinstance(value, Box):
        return value
    return Box(bounds=value)


class _ParamsMixin:
    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any], **overrides: Any) -> Any:
        """
        Build the record from a mapping, as read from a problem file.

        Unknown keys are rejected.
        """
        known = {field.name for field in attr.fields(cls)}  # type: ignore[arg-type]
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ProblemFileError(
                "Unknown {} keys: {}".format(cls.__name__, ", ".join(unknown))  # type: ignore[attr-defined]
            )
        kwargs: Dict[str, Any] = dict(mapping)
        kwargs.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ProblemFileError(f"Invalid {cls.__name__}: {exc}") from exc  # type: ignore[attr-defined]

    def to_dict(self) -> Dict[str, Any]:
        data = attr.asdict(self, recurse=False)  # type: ignore[arg-type]
        box = data.get("box")
        if isinstance(box, Box):
            data["box"] = [list(bounds) for bounds in box.bounds]
        return data


@attr.s(frozen=True, kw_only=True)
class OracleParams(_ParamsMixin):
    """
    Distance oracle parameters.

    Keyword Arguments:
        samples_per_axis:
            Grid nodes per coordinate when seeding the variety. Defaults to 161 in the plane and 41
            in three dimensions.
        search_radius:
            Half width of the default search box, centered at the query point
        box:
            Explicit search box, overriding ``search_radius``
        newton_iterations:
            Newton projection steps
        newton_tolerance:
            Newton step size at which projection stops
        refine_candidates:
            Number of separated grid candidates refined locally
        refine_iterations:
            Local refinement iteration cap
        refine_tolerance:
            Local refinement convergence tolerance
        merge_tolerance:
            Minimizers closer than this are merged
        value_band:
            Minimizers whose value is within this band of the minimum are kept
        residual_tolerance:
            Largest accepted scaled residual ``|f(x)| / (1 + |grad f(x)|)`` of a minimizer
        face_tolerance:
            Relative tolerance for a functional to be active on the scaled ball
        prune_samples:
            Points sampled per component when pruning the equidistant locus
        prune_grid:
            Marching squares cells per axis when sampling component zero sets
        seed:
            Seed for the grid shift used when sampling component zero sets during pruning
        threads:
            Worker thread cap
    """

    samples_per_axis: Optional[int] = attr.ib(default=None, validator=_positive)
    search_radius: float = attr.ib(default=4.0, converter=float, validator=_positive)
    box: Optional[Box] = attr.ib(default=None, converter=_optional_box)
    newton_iterations: int = attr.ib(default=50, validator=_positive)
    newton_tolerance: float = attr.ib(default=1e-12, converter=float, validator=_positive)
    refine_candidates: int = attr.ib(default=16, validator=_positive)
    refine_iterations: int = attr.ib(default=200, validator=_positive)
    refine_tolerance: float = attr.ib(default=1e-12, converter=float, validator=_positive)
    merge_tolerance: float = attr.ib(default=1e-5, converter=float, validator=_positive)
    value_band: float = attr.ib(default=1e-6, converter=float, validator=_positive)
    residual_tolerance: float = attr.ib(default=1e-8, converter=float, validator=_positive)
    face_tolerance: float = attr.ib(default=1e-6, converter=float, validator=_positive)
    prune_samples: int = attr.ib(default=12, validator=_positive)
    prune_grid: int = attr.ib(default=96, validator=_positive)
    seed: int = attr.ib(default=0)
    threads: int = attr.ib(validator=_positive)

    @threads.default
    def _default_threads(self) -> int:
        return default_threads()

    def grid_size(self, dimension: int) -> int:
        """
        Return the grid nodes per axis for the given dimension, always odd.
        """
        if self.samples_per_axis is not None:
            size = self.samples_per_axis
        elif dimension <= 2:
            size = 161
        else:
            size = 41
        return size if size % 2 else size + 1

    def search_box(self, center: Any) -> Box:
        """
        Return the explicit box, or the cube of half width ``search_radius`` around ``center``.
        """
        if self.box is not None:
            return self.box
        return Box.around(center, self.search_radius)


@attr.s(frozen=True, kw_only=True)
class SamplingParams(_ParamsMixin):
    """
    Stratification sampler parameters.

    Keyword Arguments:
        count:
            Approximate number of points to sample on the variety
        seed:
            Seed for the stratum targeted seeding
        denominator_cap:
            Largest denominator used when rationalizing sampled points
        boundary_slack:
            Relative slack below which a gradient is considered to lie on a fan wall
        anomaly_radius:
            Neighbourhood radius used to report closure anomalies
        stratum_seed_fraction:
            Share of ``count`` spent on stratum targeted seeds
        newton_iterations:
            Newton projection steps
        newton_tolerance:
            Newton step size at which projection stops
        threads:
            Worker thread cap
    """

    count: int = attr.ib(default=400, validator=_positive)
    seed: int = attr.ib(default=0)
    denominator_cap: int = attr.ib(default=10**6, validator=_positive)
    boundary_slack: float = attr.ib(default=1e-9, converter=float, validator=_positive)
    anomaly_radius: float = attr.ib(default=0.25, converter=float, validator=_positive)
    stratum_seed_fraction: float = attr.ib(default=0.25, converter=float)
    newton_iterations: int = attr.ib(default=50, validator=_positive)
    newton_tolerance: float = attr.ib(default=1e-12, converter=float, validator=_positive)
    threads: int = attr.ib(validator=_positive)

    @stratum_seed_fraction.validator
    def _validate_fraction(self, attribute: "attr.Attribute[float]", value: float) -> None:
        if not 0 <= value < 1:
            raise ValueError(f"stratum_seed_fraction must be in [0, 1), got {value!r}")

    @threads.default
    def _default_threads(self) -> int:
        return default_threads()
