"""Command line interface.

    circle-patterns solve problem.json [--tol EPS] [--step ETA] [--max-iter N]
        [--mode gd|lm] [--cg-tol T] [--svg out.svg] [--out solution.json]
        [--r-space] [--precondition jacobi]
    circle-patterns hex GENERATIONS [--out problem.json]

Exit codes: 0 success, 1 input error, 2 radius stage did not converge,
3 center stage failed.  A JSON diagnostics record always goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import CgStalled, DegenerateInitialState, ParseError, SingularSystem, ValidationError
from .fileio import Problem, emit_problem, emit_solution, parse_problem
from .mesh import generate_hex_disk
from .pipeline import CenterSolveConfig, compute_diagnostics, radius_diagnostics, solve
from .radius_solver import RadiusSolveConfig
from .svg import render_svg

EXIT_OK, EXIT_INPUT, EXIT_RADIUS, EXIT_CENTER = 0, 1, 2, 3

MODES = {"gd": "gradient_descent", "lm": "levenberg_marquardt"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circle-patterns", description="Planar circle patterns with prescribed angles.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute radii and centers for a problem file")
    p.add_argument("problem", type=Path)
    p.add_argument("--tol", type=float, default=1e-9, help="gradient-norm tolerance of the radius stage")
    p.add_argument("--step", type=float, default=0.1, help="gradient descent step size")
    p.add_argument("--max-iter", type=int, default=100_000, help="radius stage iteration cap")
    p.add_argument("--mode", choices=sorted(MODES), default="gd")
    p.add_argument("--lm-damping", type=float, default=1e-3)
    p.add_argument("--cg-tol", type=float, default=1e-12, help="residual tolerance of the center stage")
    p.add_argument("--cg-max-iter", type=int, default=None)
    p.add_argument("--precondition", choices=["jacobi"], default=None)
    p.add_argument("--r-space", action="store_true", help="update radii directly instead of log-radii")
    p.add_argument("--out", type=Path, default=None, help="solution file (default: stdout)")
    p.add_argument("--svg", type=Path, default=None)
    p.add_argument("--no-edges", action="store_true", help="omit triangulation edges from the SVG")
    p.add_argument("--timing", action="store_true", help="store wall time in the solution diagnostics")

    h = sub.add_parser("hex", help="write a hexagonal lattice disk problem")
    h.add_argument("generations", type=int)
    h.add_argument("--out", type=Path, default=None)
    return parser


def _emit_diagnostics(diag: dict) -> None:
    print(json.dumps(diag, sort_keys=True), file=sys.stderr)


def _solve(args) -> int:
    try:
        problem = parse_problem(args.problem.read_text())
    except (OSError, ParseError, ValidationError) as exc:
        _emit_diagnostics({"status": "input_error", "error": str(exc)})
        return EXIT_INPUT

    try:
        radius_cfg = RadiusSolveConfig(
            step_size=args.step,
            tolerance=args.tol,
            max_iterations=args.max_iter,
            mode=MODES[args.mode],
            lm_damping_init=args.lm_damping,
            radius_space=args.r_space,
        )
        center_cfg = CenterSolveConfig(args.cg_tol, args.cg_max_iter, args.precondition)
    except ValueError as exc:
        _emit_diagnostics({"status": "input_error", "error": str(exc)})
        return EXIT_INPUT

    t, w = problem.triangulation, problem.weights
    try:
        sol = solve(t, w, problem.initial_radii, radius_cfg, center_cfg)
    except DegenerateInitialState as exc:
        _emit_diagnostics({"status": "radius_failure", "error": str(exc)})
        return EXIT_RADIUS
    except (CgStalled, SingularSystem) as exc:
        _emit_diagnostics({"status": "center_failure", "error": str(exc)})
        return EXIT_CENTER

    rep = sol.radius_report
    stage = {"radius_iterations": rep.iterations, "radius_converged": rep.converged}
    if not rep.converged:
        diag = {"status": "radius_failure", **stage, **radius_diagnostics(t, w, sol.radii)}
        diag["wall_time"] = sol.wall_time
        _emit_diagnostics(diag)
        return EXIT_RADIUS

    diag = {
        **stage,
        "cg_iterations_x": sol.layout.cg_iterations[0],
        "cg_iterations_y": sol.layout.cg_iterations[1],
        **compute_diagnostics(t, w, sol.radii, sol.centers),
    }
    if args.timing:
        diag["wall_time"] = sol.wall_time
    text = emit_solution(sol.radii, sol.centers, diag)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    if args.svg is not None:
        edges = None if args.no_edges else t.edges
        args.svg.write_text(render_svg(sol.centers, sol.radii, edges))
    _emit_diagnostics({"status": "ok", **diag, "wall_time": sol.wall_time})
    return EXIT_OK


def _hex(args) -> int:
    if args.generations < 1:
        print("generations must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    t, w = generate_hex_disk(args.generations)
    text = emit_problem(Problem(t, w))
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        return _solve(args)
    return _hex(args)


if __name__ == "__main__":
    sys.exit(main())
