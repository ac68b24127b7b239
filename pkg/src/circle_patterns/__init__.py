"""Planar circle patterns with prescribed overlap and boundary angles.

Radii come from minimising the squared discrete curvature; centers from a
boundary walk plus a conjugate-gradient solve of the weighted Dirichlet
problem for the interior.
"""

from .center_solver import Layout, layout, layout_boundary
from .errors import (
    CgStalled,
    CirclePatternError,
    DegenerateInitialState,
    DegenerateTriangle,
    InconsistentOrientation,
    MultipleBoundaryComponents,
    NonManifoldEdge,
    NotADisk,
    ParseError,
    SingularSystem,
    ValidationError,
)
from .fileio import Problem, emit_problem, emit_solution, parse_problem, parse_solution
from .geometry import PatternGeometry, RadiusState, StiffnessMatrix, curvature, stiffness
from .mesh import PatternWeights, Triangulation, build_triangulation, generate_hex_disk, make_weights, validate_weights
from .pipeline import Solution, compute_diagnostics, solve
from .radius_solver import RadiusSolveConfig, RadiusSolveReport, solve_radii

__version__ = "0.1.0"
