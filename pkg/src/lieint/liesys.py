"""Lie systems, their automorphic lift to a matrix group, and the
solvers that combine a group-level stepper with a group action on the
manifold.

The geometric manifold update is x_{k+1} = phi(expm(Omega_k), x_k):
only near-identity increments are pushed through the action, so the
update is consistent wherever the fundamental fields of the action
match the system's vector fields.  When the action also satisfies the
composition law (the scalar homography does), this telescopes to
phi(Y_{k+1}, x_0); the accumulated matrices are exposed through the
returned group path either way.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .actions import ChartViolation, GroupAction
from .integrators import MatrixPath, TimeGrid, heun_step, rk4_step, step_increment
from .lie_core import LieAlgebraBasis
from .matkit import expm

__all__ = [
    "CoefficientPath",
    "LieSystem",
    "Trajectory",
    "StepFailure",
    "lift_to_group",
    "solve_lie_system",
    "solve_classical",
    "solve_via_group_action_alternate",
    "riccati_superposition",
    "global_error",
    "exact_sl2_example",
    "exact_sl3_example",
    "exact_const_riccati",
]

_CLASSICAL_STEPS = {"heun": heun_step, "rk4": rk4_step}


class StepFailure(RuntimeError):
    """A solver step failed (typically a chart violation); carries the
    index of the failing step."""

    def __init__(self, message: str, step_index: int):
        super().__init__(f"{message} (at step {step_index})")
        self.step_index = step_index


@dataclass(frozen=True)
class CoefficientPath:
    """The t-dependent coefficients b(t) of a Lie system, with optional
    analytic derivatives (used by the fourth-order Magnus stepper)."""

    evaluate: Callable[[float], np.ndarray]
    derivative1: Optional[Callable[[float], np.ndarray]] = None
    derivative2: Optional[Callable[[float], np.ndarray]] = None

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.evaluate(t), dtype=float)


@dataclass(frozen=True)
class LieSystem:
    """A Lie system dx/dt = sum_a b_a(t) X_a(x) together with the data
    needed to lift and project it: a matrix basis anti-isomorphic to
    the vector-field algebra and the group action integrating it."""

    name: str
    basis: LieAlgebraBasis
    coefficients: CoefficientPath
    action: GroupAction
    manifold_dim: int
    rhs: Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus manifold states; group-level solvers also attach
    the matrix path."""

    grid: TimeGrid
    states: np.ndarray
    group_path: Optional[list] = None


def lift_to_group(sys: LieSystem) -> MatrixPath:
    """Automorphic lift A(t) = sum_a b_a(t) M_a of the system to its
    group, with derivatives assembled from the coefficient derivatives
    when available."""
    gens = np.stack(sys.basis.generators)
    coeffs = sys.coefficients

    def combine(b):
        return np.tensordot(np.asarray(b, dtype=float), gens, axes=1)

    d1 = None
    d2 = None
    if coeffs.derivative1 is not None:
        d1 = lambda t: combine(coeffs.derivative1(t))
    if coeffs.derivative2 is not None:
        d2 = lambda t: combine(coeffs.derivative2(t))
    return MatrixPath(
        evaluate=lambda t: combine(coeffs(t)),
        n=sys.basis.n,
        derivative1=d1,
        derivative2=d2,
    )


def solve_lie_system(sys: LieSystem, scheme: str, grid: TimeGrid,
                     x0: np.ndarray) -> Trajectory:
    """Geometric solve: integrate the lift with a group scheme and push
    each step increment to the manifold through the action."""
    a_path = lift_to_group(sys)
    h = grid.h
    y = np.eye(sys.basis.n)
    x = np.atleast_1d(np.asarray(x0, dtype=float))

    states = [x]
    group_path = [y]
    for k, t_k in enumerate(grid.nodes[:-1]):
        step = expm(step_increment(scheme, a_path, t_k, h))
        y = step @ y
        try:
            x = sys.action.apply(step, x)
        except ChartViolation as exc:
            raise StepFailure(str(exc), k) from exc
        if not np.all(np.isfinite(x)):
            raise StepFailure("state became non-finite", k)
        states.append(x)
        group_path.append(y)
    return Trajectory(grid=grid, states=np.stack(states), group_path=group_path)


def solve_classical(rhs, scheme: str, grid: TimeGrid, x0: np.ndarray) -> Trajectory:
    """Direct one-step integration on the manifold coordinates (no
    structure preservation)."""
    try:
        step = _CLASSICAL_STEPS[scheme]
    except KeyError:
        raise ValueError(f"unknown classical scheme {scheme!r}")
    h = grid.h
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    states = [x]
    for k, t_k in enumerate(grid.nodes[:-1]):
        x = step(rhs, t_k, x, h)
        if not np.all(np.isfinite(x)):
            raise StepFailure("state became non-finite", k)
        states.append(x)
    return Trajectory(grid=grid, states=np.stack(states))


def solve_via_group_action_alternate(sys: LieSystem, scheme: str, grid: TimeGrid,
                                     x0: np.ndarray) -> Trajectory:
    """Non-geometric comparison solve: the group equation dY/dt = A(t) Y
    is integrated entrywise with a classical scheme, so the iterates
    drift off the group, and the manifold update applies the whole
    accumulated matrix to the current state, x_{k+1} = phi(Y_{k+1}, x_k).

    This update reuses the full transition matrix at every step, so it
    is accurate only while Y_k stays close to the identity; it serves
    as the structure-free baseline for the drift and error comparisons,
    not as a practical solver.
    """
    try:
        step = _CLASSICAL_STEPS[scheme]
    except KeyError:
        raise ValueError(f"unknown classical scheme {scheme!r}")
    a_path = lift_to_group(sys)
    n = sys.basis.n

    def matrix_rhs(t, y_flat):
        return (a_path(t) @ y_flat.reshape(n, n)).ravel()

    h = grid.h
    y = np.eye(n)
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    states = [x]
    group_path = [y]
    # overflow surfaces as a non-finite state, reported via StepFailure
    with np.errstate(all="ignore"):
        for k, t_k in enumerate(grid.nodes[:-1]):
            y = step(matrix_rhs, t_k, y.ravel(), h).reshape(n, n)
            try:
                x = sys.action.apply(y, x)
            except ChartViolation as exc:
                raise StepFailure(str(exc), k) from exc
            if not np.all(np.isfinite(x)):
                raise StepFailure("state became non-finite", k)
            states.append(x)
            group_path.append(y)
    return Trajectory(grid=grid, states=np.stack(states), group_path=group_path)


def riccati_superposition(x1: float, x2: float, x3: float, rho: float) -> float:
    """General Riccati solution from three particular solutions:
    [x2 (x3 - x1) + rho x3 (x1 - x2)] / [(x3 - x1) + rho (x1 - x2)]."""
    if x1 == x2 or x2 == x3 or x1 == x3:
        raise ValueError("particular solutions must be pairwise distinct")
    denom = (x3 - x1) + rho * (x1 - x2)
    if abs(denom) <= 1e-14:
        raise ValueError("degenerate combination: zero denominator")
    return (x2 * (x3 - x1) + rho * x3 * (x1 - x2)) / denom


def global_error(traj: Trajectory, exact) -> float:
    """Max over grid nodes of the Euclidean distance to the exact
    solution."""
    worst = 0.0
    for t_k, x_k in zip(traj.grid.nodes, traj.states):
        diff = np.atleast_1d(np.asarray(exact(t_k), dtype=float)) - x_k
        worst = max(worst, float(np.linalg.norm(diff)))
    return worst


def exact_sl2_example(t: float) -> float:
    """Closed form x(t) = (2 t^3 - 2 t^2) / (2 t - 1) of the scalar
    Riccati test problem with x(1) = 0."""
    denom = 2.0 * t - 1.0
    if abs(denom) <= 1e-14:
        raise ValueError(f"solution has a pole at t = 0.5, got t = {t}")
    return (2.0 * t**3 - 2.0 * t**2) / denom


_SQRT2 = np.sqrt(2.0)


def exact_sl3_example(t: float) -> np.ndarray:
    """Closed form of the planar affine test problem with initial
    condition (1, 0) at t = 0."""
    ch, sh = np.cosh(_SQRT2 * t), np.sinh(_SQRT2 * t)
    s10, c10 = np.sin(10.0 * t), np.cos(10.0 * t)
    x = 157.0 / 102.0 * ch - 38.0 * _SQRT2 / 51.0 * sh + 5.0 / 102.0 * s10 - 55.0 / 102.0 * c10
    y = 27.0 * _SQRT2 / 34.0 * sh + 5.0 / 102.0 * ch + 15.0 / 34.0 * s10 - 5.0 / 102.0 * c10
    return np.array([x, y])


def exact_const_riccati(t: float, x0: float) -> float:
    """Closed form of dx/dt = 1 + 2x + x^2 from x(0) = x0."""
    denom = 1.0 - t - t * x0
    if abs(denom) <= 1e-14:
        raise ValueError(f"solution blows up at t = {t}")
    return (t * x0 + x0 + t) / denom
