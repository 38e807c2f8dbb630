"""Structure-preserving solvers for Lie systems: group-level Magnus and
RKMK steppers, homography actions of the special linear groups, and a
linear-quadratic optimal-control application."""

__version__ = "0.1.0"

from .integrators import TimeGrid, MatrixPath, estimate_order
from .liesys import (
    LieSystem,
    Trajectory,
    global_error,
    solve_classical,
    solve_lie_system,
    solve_via_group_action_alternate,
)
from .problems import get_problem, problem_names

__all__ = [
    "TimeGrid",
    "MatrixPath",
    "estimate_order",
    "LieSystem",
    "Trajectory",
    "global_error",
    "solve_classical",
    "solve_lie_system",
    "solve_via_group_action_alternate",
    "get_problem",
    "problem_names",
]
