# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Test SVG scene rendering.
"""
import pytest

from polyvor import medial
from polyvor import svg
from polyvor import variety
from polyvor.customtypes import Box
from polyvor.exceptions import DimensionMismatch
from polyvor.polytope import UnitBall
from polyvor.variety import Hypersurface
from polyvor.variety import SampleLabel


def make_scene(size: int = 480) -> svg.SceneOutput:
    return svg.SceneOutput(viewport=svg.Viewport(box=Box.around((0, 0), 2), size=size))


def test_viewport() -> None:
    viewport = svg.Viewport(box=Box(bounds=[(-2, 2), (-1, 1)]), size=400)
    assert viewport.scale == 100
    assert (viewport.width, viewport.height) == (400, 200)
    assert viewport((-2, 1)) == (0, 0)
    assert viewport((2, -1)) == (400, 200)
    with pytest.raises(DimensionMismatch):
        svg.Viewport(box=Box.around((0, 0, 0), 1))


def test_ball_layers(square: UnitBall) -> None:
    scene = make_scene()
    svg.add_ball(scene, square)
    assert scene.layers["ball"] == [
        '<polygon points="120,360 360,360 360,120 120,120" fill="none" stroke="black" stroke-width="1.5" />'
    ]
    assert len(scene.layers["dual-ball"]) == 1
    assert len(scene.layers["fan"]) == 4
    rendered = scene.render()
    assert rendered.startswith('<?xml version="1.0" encoding="UTF-8"?>\n<svg ')
    assert 'width="480" height="480"' in rendered
    assert rendered.index('<g id="ball">') < rendered.index('<g id="dual-ball">') < rendered.index('<g id="fan">')
    assert '<g id="curve">' not in rendered
    assert rendered.endswith("</svg>\n")


def test_unknown_layer() -> None:
    with pytest.raises(ValueError):
        make_scene().circle("legend", (0, 0), 1.0)


def test_render_is_deterministic(square: UnitBall, circle: Hypersurface) -> None:
    def build() -> str:
        scene = make_scene()
        svg.add_ball(scene, square)
        svg.add_curve(scene, circle, cells=40)
        svg.add_components(scene, medial.equidistant_locus(circle, square, threads=2), cells=40)
        svg.add_voronoi_cones(scene, [variety.voronoi_cone(circle, square, ["3/5", "4/5"])])
        return scene.render()

    first = build()
    assert first == build()
    assert '<g id="curve">' in first
    assert '<g id="components">' in first
    assert svg.PROVENANCE_COLORS[medial.Provenance.FACET_FACET] in first


def test_unsupported_components_are_dashed(square: UnitBall, parabola: Hypersurface) -> None:
    components = medial.equidistant_locus(parabola, square, threads=2)
    drawable = [item for item in components if item.poly is not None and not item.poly.is_constant]
    scene = make_scene()
    svg.add_components(scene, drawable, unsupported=drawable, cells=40)
    assert scene.layers["components"]
    assert all('stroke-dasharray="5 4"' in element for element in scene.layers["components"])
    plain = make_scene()
    svg.add_components(plain, drawable, cells=40)
    assert not any("stroke-dasharray" in element for element in plain.layers["components"])


def make_label(point, index, singular: bool = False) -> SampleLabel:
    return SampleLabel(
        point=point,
        rational_point=(),
        exact_index=index,
        face_id=None,
        advisory_index=index,
        singular=singular,
    )


def test_strata_colors() -> None:
    assert svg.stratum_color(make_label((0.0, 0.0), 0)) == svg.STRATUM_COLORS[0]
    assert svg.stratum_color(make_label((0.0, 0.0), 1)) == svg.STRATUM_COLORS[1]
    assert svg.stratum_color(make_label((0.0, 0.0), None, singular=True)) == svg.SINGULAR_COLOR
    scene = make_scene()
    svg.add_strata(scene, [make_label((1.0, 0.0), 0), make_label((0.6, 0.8), 1)])
    first, second = scene.layers["strata"]
    assert svg.STRATUM_COLORS[1] in first
    assert svg.STRATUM_COLORS[0] in second


def test_save(tmp_path, square: UnitBall) -> None:
    scene = make_scene()
    svg.add_ball(scene, square, dual=False)
    svg.add_points(scene, [(0.5, 0.5)])
    path = tmp_path / "scene.svg"
    scene.save(path)
    assert path.read_text(encoding="utf-8") == scene.render()
    assert '<g id="dual-ball">' not in scene.render()
