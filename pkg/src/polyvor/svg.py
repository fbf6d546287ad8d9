# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
SVG rendering of plane scenes.

A scene is a fixed stack of layers drawn in order, so the same inputs always produce the same
bytes.
"""
import logging
import math
import pathlib
from typing import Any
from typing import Dict
from typing import Iterable
from typing import List
from typing import Mapping
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import attr
import numpy as np

from polyvor import sampling
from polyvor.customtypes import Box
from polyvor.exceptions import DimensionMismatch
from polyvor.medial import EquidistantComponent
from polyvor.medial import Provenance
from polyvor.polynomials import MultiPoly
from polyvor.polynomials import NumericPolynomial
from polyvor.polytope import UnitBall
from polyvor.polytope import dual_ball
from polyvor.variety import Hypersurface
from polyvor.variety import SampleLabel
from polyvor.variety import VoronoiCone

log = logging.getLogger(__name__)

SVG_NAMESPACE = "http://www.w3.org/2000/svg"

LAYERS = ("ball", "dual-ball", "fan", "curve", "components", "cones", "strata", "points")

STRATUM_COLORS = {0: "#1f77b4", 1: "#ff7f0e", 2: "#9467bd"}
SINGULAR_COLOR = "#7f7f7f"
PROVENANCE_COLORS = {
    Provenance.VERTEX_VERTEX: "#2ca02c",
    Provenance.VERTEX_FACET: "#d62728",
    Provenance.FACET_FACET: "#8c564b",
}

Point = Tuple[float, float]


def _number(value: float) -> str:
    rounded = round(float(value), 3)
    if rounded == int(rounded):
        return str(int(rounded))
    return f"{rounded:.3f}".rstrip("0")


def _props(props: Mapping[str, Any]) -> str:
    parts = []
    for key, value in props.items():
        if value is None:
            continue
        if isinstance(value, float):
            value = _number(value)
        parts.append(f'{key.replace("_", "-")}="{value}"')
    return " ".join(parts)


@attr.s(frozen=True, kw_only=True)
class Viewport:
    """
    Map a plane box onto a pixel canvas, with ``y`` pointing up.
    """

    box: Box = attr.ib()
    size: int = attr.ib(default=480)

    def __attrs_post_init__(self) -> None:
        if self.box.dimension != 2:
            raise DimensionMismatch("Only plane scenes can be rendered")

    @property
    def scale(self) -> float:
        (xlow, xhigh), (ylow, yhigh) = self.box.bounds
        return self.size / max(xhigh - xlow, yhigh - ylow)

    @property
    def width(self) -> int:
        (xlow, xhigh), _ = self.box.bounds
        return int(round((xhigh - xlow) * self.scale))

    @property
    def height(self) -> int:
        _, (ylow, yhigh) = self.box.bounds
        return int(round((yhigh - ylow) * self.scale))

    def __call__(self, point: Sequence[float]) -> Point:
        (xlow, _), (_, yhigh) = self.box.bounds
        return ((float(point[0]) - xlow) * self.scale, (yhigh - float(point[1])) * self.scale)


@attr.s(kw_only=True)
class SceneOutput:
    """
    A plane scene made of named layers of SVG elements.

    Keyword Arguments:
        viewport:
            The drawn region and canvas size
        layers:
            SVG elements per layer name, drawn in :py:data:`LAYERS` order
    """

    viewport: Viewport = attr.ib()
    layers: Dict[str, List[str]] = attr.ib(factory=lambda: {name: [] for name in LAYERS})

    def _add(self, layer: str, tag: str, **props: Any) -> None:
        if layer not in self.layers:
            raise ValueError(f"Unknown layer {layer!r}")
        self.layers[layer].append(f"<{tag} {_props(props)} />")

    def polygon(self, layer: str, points: Iterable[Sequence[float]], **props: Any) -> None:
        coords = " ".join(f"{_number(x)},{_number(y)}" for x, y in map(self.viewport, points))
        self._add(layer, "polygon", points=coords, **props)

    def segment(self, layer: str, start: Sequence[float], end: Sequence[float], **props: Any) -> None:
        (x1, y1), (x2, y2) = self.viewport(start), self.viewport(end)
        self._add(layer, "line", x1=x1, y1=y1, x2=x2, y2=y2, **props)

    def circle(self, layer: str, center: Sequence[float], radius: float, **props: Any) -> None:
        cx, cy = self.viewport(center)
        self._add(layer, "circle", cx=cx, cy=cy, r=float(radius), **props)

    def render(self) -> str:
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            "<svg {}>".format(
                _props(
                    {
                        "xmlns": SVG_NAMESPACE,
                        "version": "1.1",
                        "width": self.viewport.width,
                        "height": self.viewport.height,
                    }
                )
            ),
            '<rect x="0" y="0" width="100%" height="100%" fill="white" />',
        ]
        for name in LAYERS:
            elements = self.layers.get(name) or []
            if not elements:
                continue
            lines.append(f'<g id="{name}">')
            lines.extend(elements)
            lines.append("</g>")
        lines.append("</svg>")
        return "\n".join(lines) + "\n"

    def save(self, path: Union[str, pathlib.Path]) -> None:
        pathlib.Path(path).write_text(self.render(), encoding="utf-8")
        log.info("Wrote SVG scene to %s", path)


def _ordered_polygon(points: Sequence[Sequence[Any]]) -> List[Point]:
    floats = [(float(x), float(y)) for x, y in points]
    return sorted(floats, key=lambda item: math.atan2(item[1], item[0]))


def add_ball(
    scene: SceneOutput,
    ball: UnitBall,
    center: Sequence[float] = (0.0, 0.0),
    radius: float = 1.0,
    dual: bool = True,
) -> None:
    """
    Draw the unit ball, its dual and the rays of the inner normal fan, scaled by ``radius``.
    """
    cx, cy = (float(c) for c in center)

    def place(points: Sequence[Point]) -> List[Point]:
        return [(cx + radius * x, cy + radius * y) for x, y in points]

    scene.polygon(
        "ball", place(_ordered_polygon(ball.vertices)), fill="none", stroke="black", stroke_width=1.5
    )
    if dual:
        scene.polygon(
            "dual-ball",
            place(_ordered_polygon(dual_ball(ball).vertices)),
            fill="none",
            stroke="#aaaaaa",
            stroke_dasharray="4 3",
        )
    for functional in ball.functionals.functionals:
        direction = np.array([-float(c) for c in functional])
        direction /= np.linalg.norm(direction)
        end = (cx + 1.5 * radius * direction[0], cy + 1.5 * radius * direction[1])
        scene.segment("fan", (cx, cy), end, stroke="#bbbbbb", stroke_width=0.8)


def _draw_zero_set(scene: SceneOutput, layer: str, poly: MultiPoly, cells: int, **props: Any) -> int:
    numeric = NumericPolynomial.build(poly)
    segments = sampling.contour_segments(numeric, scene.viewport.box, cells)
    for start, end in segments:
        scene.segment(layer, start, end, **props)
    return len(segments)


def add_curve(scene: SceneOutput, surface: Hypersurface, cells: int = 160) -> None:
    _draw_zero_set(scene, "curve", surface.poly, cells, stroke="black", stroke_width=2)


def add_components(
    scene: SceneOutput,
    components: Sequence[EquidistantComponent],
    unsupported: Sequence[EquidistantComponent] = (),
    cells: int = 120,
) -> None:
    """
    Draw component zero sets colored by provenance; unsupported ones are dashed.
    """
    dashed = {id(item) for item in unsupported}
    for component in components:
        if component.poly is None or component.poly.is_constant:
            continue
        poly = MultiPoly.from_sympy(component.poly.as_poly().sqf_part())
        _draw_zero_set(
            scene,
            "components",
            poly,
            cells,
            stroke=PROVENANCE_COLORS.get(component.provenance, "#000000"),
            stroke_width=1,
            stroke_dasharray="5 4" if id(component) in dashed else None,
        )


def add_voronoi_cones(scene: SceneOutput, cones: Sequence[VoronoiCone], length: Optional[float] = None) -> None:
    """
    Draw each Voronoi cone as a wedge, or a ray for one dimensional cones, from its apex.
    """
    if length is None:
        length = scene.viewport.box.diameter / 4
    for voronoi in cones:
        apex = tuple(float(c) for c in voronoi.apex)
        for cone in voronoi.cones:
            directions = [np.array([float(c) for c in gen]) for gen in cone.generators]
            ends = [np.array(apex) + length * d / np.linalg.norm(d) for d in directions]
            if len(ends) == 1:
                scene.segment("cones", apex, ends[0], stroke="#17becf", stroke_width=1.5)
            else:
                scene.polygon(
                    "cones",
                    [apex] + [tuple(end) for end in ends],
                    fill="#17becf",
                    fill_opacity=0.25,
                    stroke="#17becf",
                )
        scene.circle("points", apex, 3.0, fill="black")


def stratum_color(label: SampleLabel) -> str:
    if label.singular or label.exact_index is None:
        return SINGULAR_COLOR
    return STRATUM_COLORS.get(label.exact_index, SINGULAR_COLOR)


def add_strata(scene: SceneOutput, labels: Sequence[SampleLabel], radius: float = 2.0) -> None:
    """
    Draw sampled points colored by stratum index, lower dimensional strata on top.
    """
    ordered = sorted(
        labels,
        key=lambda label: (-(label.exact_index if label.exact_index is not None else -1), label.point),
    )
    for label in ordered:
        scene.circle("strata", label.point, radius, fill=stratum_color(label))


def add_points(scene: SceneOutput, points: Sequence[Sequence[float]], color: str = "black") -> None:
    for point in points:
        scene.circle("points", point, 3.0, fill=color)
