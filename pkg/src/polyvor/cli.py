# Copyright 2024 The Polyvor Developers
# SPDX-License-Identifier: Apache-2.0
"""
Command line interface.

Every command reads one problem, from ``--input FILE`` or ``--example NAME``, and writes a JSON
result to ``--output FILE`` or stdout. Plane scenes can also be written as SVG with ``--svg FILE``.
Exit codes are those of :py:mod:`polyvor.exceptions`: 0 on success, 1 for problem file and usage
errors, 2 for invalid balls, 3 for points off the variety, 4 for singular points and 5 for distance
oracle failures.
"""
import argparse
import json
import logging
import pathlib
import sys
from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import NoReturn
from typing import Optional
from typing import Sequence

from polyvor import catalog
from polyvor import medial
from polyvor import oracle
from polyvor import polytope
from polyvor import svg
from polyvor import variety
from polyvor.customtypes import RationalVector
from polyvor.exceptions import PolyvorException
from polyvor.exceptions import ProblemFileError
from polyvor.polytope import Face
from polyvor.polytope import UnitBall
from polyvor.problem import ProblemFile
from polyvor.utils import format_vector
from polyvor.utils import rational_vector

log = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s,%(msecs)03.0f [%(name)-5s:%(lineno)-4d][%(levelname)-8s] %(message)s"
LOG_DATE_FORMAT = "%H:%M:%S"


def _face_json(ball: UnitBall, face: Face) -> Dict[str, Any]:
    return {
        "id": face.id,
        "dim": face.dim,
        "index": ball.codim_index(face),
        "vertices": [format_vector(vertex) for vertex in ball.face_vertices(face)],
        "functionals": [format_vector(item) for item in ball.face_functionals(face)],
    }


def _vectors_json(vectors: Sequence[RationalVector]) -> List[List[str]]:
    return [format_vector(vector) for vector in vectors]


def _points(problem: ProblemFile) -> Sequence[RationalVector]:
    if not problem.points:
        raise ProblemFileError("This command needs query points, from the problem or --point")
    return problem.points


def _scene(problem: ProblemFile) -> svg.SceneOutput:
    return svg.SceneOutput(viewport=svg.Viewport(box=problem.sampling_box()))


def _plane_only(problem: ProblemFile, args: argparse.Namespace) -> bool:
    if args.svg is None:
        return False
    if problem.dimension != 2:
        log.warning("Only plane scenes are rendered; not writing %s", args.svg)
        return False
    return True


def cmd_ball_info(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Vertices, face counts, the dual ball and the inner normal fan.
    """
    ball = problem.unit_ball()
    dual = polytope.dual_ball(ball)
    fan = []
    for face in ball.faces:
        entry = _face_json(ball, face)
        entry["fan_generators"] = _vectors_json(polytope.cone_generators(ball, face).generators)
        fan.append(entry)
    if _plane_only(problem, args):
        scene = _scene(problem)
        svg.add_ball(scene, ball)
        scene.save(args.svg)
    return {
        "dimension": ball.dimension,
        "functionals": _vectors_json(ball.functionals.functionals),
        "vertices": _vectors_json(ball.vertices),
        "face_counts": {str(dim): count for dim, count in polytope.face_counts(ball).items()},
        "dual_vertices": _vectors_json(dual.vertices),
        "dual_face_counts": {str(dim): count for dim, count in polytope.face_counts(dual).items()},
        "fan_cone_counts": {str(dim): count for dim, count in polytope.fan_cone_counts(ball).items()},
        "faces": fan,
    }


def cmd_type(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Type, stratum index and Voronoi cone of every query point.
    """
    ball = problem.unit_ball()
    results = []
    if problem.normals:
        for point, normals in zip(_points(problem), problem.normals):
            result = variety.type_general(normals, ball)
            faces = result.faces(ball)
            counts: Dict[str, int] = {}
            for face in faces:
                counts[str(face.dim)] = counts.get(str(face.dim), 0) + 1
            results.append(
                {
                    "point": format_vector(point),
                    "normals": _vectors_json(normals),
                    "faces": [_face_json(ball, face) for face in faces],
                    "counts_by_dim": dict(sorted(counts.items())),
                }
            )
        return {"types": results}
    surface = problem.hypersurface()
    for point in _points(problem):
        result = variety.type_of(surface, ball, point)
        label = variety.stratum_of(surface, ball, point)
        cone = variety.voronoi_cone(surface, ball, point)
        results.append(
            {
                "point": format_vector(point),
                "faces": [_face_json(ball, face) for face in result.faces(ball)],
                "stratum": label.index,
                "certificate": format_vector(label.certificate),
                "voronoi_cone": [_vectors_json(item.generators) for item in cone.cones],
            }
        )
    return {"types": results}


def cmd_voronoi_cone(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Voronoi cones of the query points.
    """
    ball = problem.unit_ball()
    surface = problem.hypersurface()
    cones = [variety.voronoi_cone(surface, ball, point) for point in _points(problem)]
    if _plane_only(problem, args):
        scene = _scene(problem)
        svg.add_curve(scene, surface)
        svg.add_voronoi_cones(scene, cones)
        scene.save(args.svg)
    return {
        "voronoi_cones": [
            {
                "apex": format_vector(cone.apex),
                "dimension": cone.dimension,
                "cones": [
                    {"face_id": face_id, "generators": _vectors_json(item.generators)}
                    for face_id, item in zip(cone.face_ids, cone.cones)
                ],
            }
            for cone in cones
        ]
    }


def cmd_stratify(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Sample the variety, label the samples by stratum and report closure anomalies.
    """
    ball = problem.unit_ball()
    surface = problem.hypersurface()
    params = problem.sampling_params(args.seed)
    labels = variety.sample_and_classify(surface, ball, problem.sampling_box(), params=params)
    anomalies = variety.closure_anomalies(labels, params.anomaly_radius)
    for anomaly in anomalies:
        log.warning(
            "Stratum %d sample %s has no stratum %d sample within %s",
            anomaly.index,
            anomaly.point,
            anomaly.index + 1,
            anomaly.radius,
        )
    exact = []
    for point in problem.points:
        label = variety.stratum_of(surface, ball, point)
        exact.append({"point": format_vector(point), "index": label.index, "face_id": label.face_id})
    if _plane_only(problem, args):
        scene = _scene(problem)
        svg.add_curve(scene, surface)
        svg.add_strata(scene, labels)
        scene.save(args.svg)
    return {
        "approximate": True,
        "histogram": variety.stratum_histogram(labels),
        "points": exact,
        "samples": [
            {
                "point": list(label.point),
                "exact_index": label.exact_index,
                "face_id": label.face_id,
                "advisory_index": label.advisory_index,
                "near_boundary": label.near_boundary,
            }
            for label in labels
        ],
        "closure_anomalies": [
            {
                "point": list(item.point),
                "index": item.index,
                "nearest": item.nearest if item.nearest != float("inf") else None,
            }
            for item in anomalies
        ],
    }


def _component_json(component: medial.EquidistantComponent, status: Optional[str] = None) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "face_pair": list(component.face_pair),
        "provenance": component.provenance.value,
        "polynomial": None if component.poly is None else component.poly.to_string("u"),
        "terms": None if component.poly is None else component.poly.to_term_list(),
        "degree": component.degree,
        "degree_bound": component.degree_bound,
        "raw_degree": component.raw_degree,
        "zero_resultant": component.zero_resultant_flag,
        "exact": component.exact,
        "annotations": list(component.annotations),
        "tangent_points": [
            format_vector(item.point) if item.point is not None else list(item.approximate)
            for item in component.tangent_points
        ],
    }
    if status is not None:
        data["status"] = status
    return data


def cmd_medial(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Equidistant components with provenance, degree bounds and, for plane curves, oracle pruning.
    """
    ball = problem.unit_ball()
    surface = problem.hypersurface()
    params = problem.oracle_params(args.seed)
    components = medial.equidistant_locus(surface, ball, problem.box, params.threads)
    for item in medial.out_of_scope_pairs(components):
        log.warning("Face pair %s is outside the vertex and facet eliminations", item.face_pair)
    for item in medial.full_dimensional_candidates(components):
        log.warning("Face pair %s has an identically zero elimination", item.face_pair)
    statuses: Dict[int, str] = {}
    unsupported: List[medial.EquidistantComponent] = []
    if surface.dimension == 2 and not args.no_prune:
        pruned = oracle.prune_components(components, surface, ball, params)
        for idx, verdict in enumerate(pruned.verdicts):
            statuses[idx] = verdict.status
        unsupported = pruned.unsupported
    report = medial.degree_report(components)
    if _plane_only(problem, args):
        scene = _scene(problem)
        svg.add_curve(scene, surface)
        svg.add_components(scene, [item for item in components if item.poly is not None], unsupported)
        scene.save(args.svg)
    return {
        "components": [
            _component_json(component, statuses.get(idx)) for idx, component in enumerate(components)
        ],
        "degree_report": [
            {
                "face_pair": list(entry.face_pair),
                "provenance": entry.provenance.value,
                "degree": entry.degree,
                "bound": entry.bound,
                "satisfied": entry.satisfied,
            }
            for entry in report
        ],
        "degree_bounds_satisfied": all(entry.satisfied for entry in report),
        "full_dimensional_candidates": [
            list(item.face_pair) for item in medial.full_dimensional_candidates(components)
        ],
        "out_of_scope": [list(item.face_pair) for item in medial.out_of_scope_pairs(components)],
    }


def cmd_distance(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Distance from every query point to the variety, with its minimizers.
    """
    ball = problem.unit_ball()
    surface = problem.hypersurface()
    params = problem.oracle_params(args.seed)
    results = []
    for point in _points(problem):
        result = oracle.distance_to_variety(surface, ball, point, params)
        results.append(
            {
                "point": format_vector(point),
                "approximate": result.approximate,
                "value": result.value,
                "minimizers": [list(item) for item in result.minimizers],
                "values": list(result.values),
                "residuals": list(result.residuals),
                "optimizing_faces": list(result.optimizing_faces),
                "medial": result.is_medial,
            }
        )
    return {"distances": results}


def cmd_render(problem: ProblemFile, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Render the ball, its dual, the fan, the curve and the Voronoi cones of the query points.
    """
    if args.svg is None:
        raise ProblemFileError("The render command needs --svg")
    if problem.dimension != 2:
        raise ProblemFileError("Only plane problems can be rendered")
    ball = problem.unit_ball()
    scene = _scene(problem)
    svg.add_ball(scene, ball)
    if problem.polynomial is not None:
        surface = problem.hypersurface()
        svg.add_curve(scene, surface)
        svg.add_voronoi_cones(
            scene, [variety.voronoi_cone(surface, ball, point) for point in problem.points]
        )
    scene.save(args.svg)
    return {
        "svg": str(args.svg),
        "layers": {name: len(elements) for name, elements in scene.layers.items()},
    }


COMMANDS: Dict[str, Callable[[ProblemFile, argparse.Namespace], Dict[str, Any]]] = {
    "ball-info": cmd_ball_info,
    "type": cmd_type,
    "voronoi-cone": cmd_voronoi_cone,
    "stratify": cmd_stratify,
    "medial": cmd_medial,
    "distance": cmd_distance,
    "render": cmd_render,
}


def _parse_point(value: str) -> RationalVector:
    try:
        return rational_vector(part for part in value.split(","))
    except ProblemFileError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


class _ArgumentParser(argparse.ArgumentParser):
    """
    Usage errors share exit code 1 with problem file errors.
    """

    def error(self, message: str) -> "NoReturn":
        self.print_usage(sys.stderr)
        self.exit(ProblemFileError.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="polyvor",
        description="Voronoi geometry of hypersurfaces under polyhedral norms",
    )
    parser.add_argument(
        "--log-level",
        default="warning",
        choices=("debug", "info", "warning", "error", "critical"),
        help="Logging level, logs go to stderr. Default: %(default)s",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        subparser = subparsers.add_parser(name, help=(func.__doc__ or "").strip().splitlines()[0])
        source = subparser.add_mutually_exclusive_group(required=True)
        source.add_argument("--input", type=pathlib.Path, help="JSON problem file")
        source.add_argument(
            "--example",
            help="A built in problem, optionally with a ball, like 'circle' or 'circle:diamond'",
        )
        subparser.add_argument("--output", type=pathlib.Path, help="JSON result file. Default: stdout")
        subparser.add_argument("--svg", type=pathlib.Path, help="Write the plane scene as SVG")
        subparser.add_argument("--seed", type=int, help="Random seed for sampling")
        subparser.add_argument(
            "--point",
            action="append",
            type=_parse_point,
            help="Query point as comma separated rationals, like '3/5,4/5'. Repeatable",
        )
        if name == "medial":
            subparser.add_argument(
                "--no-prune", action="store_true", help="Skip sorting components with the distance oracle"
            )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line interface and return the exit status.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format=LOG_FORMAT,
        datefmt=LOG_DATE_FORMAT,
        stream=sys.stderr,
    )
    try:
        if args.input is not None:
            problem = ProblemFile.load(args.input)
        else:
            problem = catalog.load_example(args.example)
        if args.point:
            problem = ProblemFile.from_dict(
                dict(problem.to_dict(), points=[format_vector(point) for point in args.point], normals=[])
            )
        log.info("Running %s on %s", args.command, problem.name or args.input)
        result = COMMANDS[args.command](problem, args)
    except PolyvorException as exc:
        sys.stderr.write(f"polyvor: error: {exc}\n")
        return exc.exit_code
    output = json.dumps(result, indent=2) + "\n"
    if args.output is not None:
        args.output.write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return 0
