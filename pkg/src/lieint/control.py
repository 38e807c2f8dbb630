"""Linear-quadratic optimal control: backward matrix Riccati solve,
feedback gain, closed-loop simulation and cost evaluation.

The backward solve reverses time by substitution (tau = t0 + tf - t),
so the steppers always see a positive step.  For scalar problems the
reversed Riccati equation is solved as a Lie system on the 2 x 2
unimodular group through the homography action; a direct classical
integration of the same equation is available for cross-checking.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .actions import sl2_group_action
from .integrators import GROUP_SCHEMES, TimeGrid, rk4_step
from .lie_core import sl2_basis
from .liesys import CoefficientPath, LieSystem, Trajectory, solve_classical, solve_lie_system

__all__ = [
    "LqrProblem",
    "FeedbackLaw",
    "ValuePath",
    "vehicle_problem",
    "riccati_backward_solve",
    "feedback_gain",
    "closed_loop_simulate",
    "cost_eval",
    "constant_control",
    "vehicle_cost_pair",
]

_EIG_TOL = 1e-10


def _check_symmetric(m: np.ndarray, label: str, positive_definite: bool = False):
    if not np.allclose(m, m.T, atol=1e-12):
        raise ValueError(f"{label} must be symmetric")
    eigs = np.linalg.eigvalsh(m)
    if positive_definite:
        if np.min(eigs) <= _EIG_TOL:
            raise ValueError(f"{label} must be positive definite")
    elif np.min(eigs) < -_EIG_TOL:
        raise ValueError(f"{label} must be positive semi-definite")


@dataclass(frozen=True)
class LqrProblem:
    """Time-invariant linear plant dx/dt = A x + B u with quadratic cost
    x(tf)' S x(tf) + int x' Q x + int u' R u over [t0, tf]."""

    a: np.ndarray
    b: np.ndarray
    q: np.ndarray
    r: np.ndarray
    s: np.ndarray
    t0: float
    tf: float

    def __post_init__(self):
        _check_symmetric(self.q, "Q")
        _check_symmetric(self.s, "S")
        _check_symmetric(self.r, "R", positive_definite=True)
        if self.tf <= self.t0:
            raise ValueError("need tf > t0")

    @property
    def state_dim(self) -> int:
        return self.a.shape[0]


def vehicle_problem() -> LqrProblem:
    """Cruise-control model linearized at unit speed: scalar plant
    d(dv)/dt = -2 dv + du with unit cost weights on [0, 1]."""
    one = np.array([[1.0]])
    return LqrProblem(
        a=np.array([[-2.0]]), b=one, q=one, r=one, s=one, t0=0.0, tf=1.0
    )


@dataclass(frozen=True)
class ValuePath:
    """Riccati solution P on the grid nodes (original time direction),
    linearly interpolated between nodes."""

    times: np.ndarray
    values: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        times = self.times
        if t <= times[0]:
            return self.values[0]
        if t >= times[-1]:
            return self.values[-1]
        i = int(np.searchsorted(times, t)) - 1
        w = (t - times[i]) / (times[i + 1] - times[i])
        return (1.0 - w) * self.values[i] + w * self.values[i + 1]


@dataclass(frozen=True)
class FeedbackLaw:
    """State feedback u = K(t) x with K(t) = -R^-1 B' P(t)."""

    p_path: ValuePath
    gain: Callable[[float], np.ndarray]


def _reversed_riccati_rhs(prob: LqrProblem):
    br_inv_bt = prob.b @ np.linalg.inv(prob.r) @ prob.b.T

    def rhs(tau, p_flat):
        p = p_flat.reshape(prob.state_dim, prob.state_dim)
        forward = p @ br_inv_bt @ p - p @ prob.a - prob.a.T @ p - prob.q
        return (-forward).ravel()

    return rhs


def _scalar_reversed_lie_system(prob: LqrProblem) -> LieSystem:
    # reversed scalar Riccati dP/dtau = q + 2a P - (b^2 / r) P^2
    q = float(prob.q[0, 0])
    two_a = 2.0 * float(prob.a[0, 0])
    neg_b2r = -float(prob.b[0, 0]) ** 2 / float(prob.r[0, 0])
    b_vec = np.array([q, two_a, neg_b2r])
    zero = np.zeros(3)
    return LieSystem(
        name="lqr-reversed",
        basis=sl2_basis(),
        coefficients=CoefficientPath(
            evaluate=lambda t: b_vec,
            derivative1=lambda t: zero,
            derivative2=lambda t: zero,
        ),
        action=sl2_group_action(),
        manifold_dim=1,
        rhs=lambda t, x: q + two_a * x + neg_b2r * x**2,
    )


def riccati_backward_solve(prob: LqrProblem, scheme: str, grid: TimeGrid) -> ValuePath:
    """Solve the matrix Riccati equation backward from P(tf) = S.

    Group schemes route the scalar case through the unimodular lift and
    homography action; "rk4"/"heun" integrate the reversed equation
    entrywise (also the only route for matrix-valued problems).
    """
    if abs(grid.a - prob.t0) > 1e-12 or abs(grid.b - prob.tf) > 1e-12:
        raise ValueError(f"grid [{grid.a}, {grid.b}] must cover [{prob.t0}, {prob.tf}]")
    n = prob.state_dim
    tau_grid = TimeGrid(0.0, prob.tf - prob.t0, grid.steps)

    if scheme in GROUP_SCHEMES:
        if n != 1:
            raise ValueError("the group-action route applies to scalar problems only")
        traj = solve_lie_system(_scalar_reversed_lie_system(prob), scheme, tau_grid,
                                np.array([float(prob.s[0, 0])]))
        values = traj.states.reshape(-1, 1, 1)
    else:
        traj = solve_classical(_reversed_riccati_rhs(prob), scheme, tau_grid, prob.s.ravel())
        values = traj.states.reshape(-1, n, n)

    # tau runs from tf back toward t0; flip onto the original direction
    return ValuePath(times=grid.nodes, values=values[::-1].copy())


def feedback_gain(p_path: ValuePath, prob: LqrProblem) -> FeedbackLaw:
    """Nodewise feedback gain K(t) = -R^-1 B' P(t)."""
    r_inv_bt = np.linalg.inv(prob.r) @ prob.b.T

    def gain(t):
        return -r_inv_bt @ p_path(t)

    return FeedbackLaw(p_path=p_path, gain=gain)


def closed_loop_simulate(plant_rhs, law: Union[FeedbackLaw, float],
                         x0: np.ndarray, grid: TimeGrid) -> Trajectory:
    """Integrate the plant under a feedback law (u = K(t) x) or a
    constant input, with RK4 at the grid step.

    `plant_rhs` has signature (t, x, u) -> dx/dt.
    """
    if isinstance(law, FeedbackLaw):
        input_at = lambda t, x: law.gain(t) @ x
    else:
        const = float(law)
        input_at = lambda t, x: np.full(1, const)

    def rhs(t, x):
        return np.atleast_1d(plant_rhs(t, x, input_at(t, x)))

    x = np.atleast_1d(np.asarray(x0, dtype=float))
    states = [x]
    for t_k in grid.nodes[:-1]:
        x = rk4_step(rhs, t_k, x, grid.h)
        states.append(x)
    return Trajectory(grid=grid, states=np.stack(states))


def _simpson(values: np.ndarray, h: float) -> float:
    n = len(values) - 1
    if n % 2 != 0:
        raise ValueError("composite Simpson needs an even number of panels")
    return h / 3.0 * float(
        values[0] + values[-1] + 4.0 * np.sum(values[1:-1:2]) + 2.0 * np.sum(values[2:-1:2])
    )


def cost_eval(traj: Trajectory, u: Callable[[float, np.ndarray], np.ndarray],
              prob: LqrProblem) -> float:
    """Quadratic cost along a trajectory, with composite Simpson for the
    running terms.  An odd panel count is refined by inserting linearly
    interpolated midpoints."""
    times = traj.grid.nodes
    states = traj.states
    if (len(times) - 1) % 2 != 0:
        mids_t = 0.5 * (times[:-1] + times[1:])
        mids_x = 0.5 * (states[:-1] + states[1:])
        times = np.sort(np.concatenate([times, mids_t]))
        states = np.empty((len(times), states.shape[1]))
        states[0::2] = traj.states
        states[1::2] = mids_x

    x_quad = np.array([x @ prob.q @ x for x in states])
    u_quad = np.array([
        (lambda uu: uu @ prob.r @ uu)(np.atleast_1d(u(t, x)))
        for t, x in zip(times, states)
    ])
    h = times[1] - times[0]
    terminal = float(states[-1] @ prob.s @ states[-1])
    return terminal + _simpson(x_quad, h) + _simpson(u_quad, h)


def constant_control(v_bar: float) -> float:
    """Constant input that returns the linearized vehicle from speed
    v_bar to cruise speed in unit time: (2 v_bar - 2) / (1 - e^2)."""
    return (2.0 * v_bar - 2.0) / (1.0 - np.e**2)


def vehicle_cost_pair(v_bar: float, h: float = 1e-3,
                      scheme: str = "rkmk4") -> tuple:
    """Cost of the optimal and the constant control for the vehicle
    problem started at speed v_bar.  Returns (J_optimal, J_constant).

    The closed-loop trajectory is refined 4x relative to the gain grid
    before the cost quadrature.
    """
    prob = vehicle_problem()
    gain_grid = TimeGrid.from_step(prob.t0, prob.tf, h)
    law = feedback_gain(riccati_backward_solve(prob, scheme, gain_grid), prob)
    sim_grid = TimeGrid(prob.t0, prob.tf, 4 * gain_grid.steps)

    def plant(t, x, u):
        return prob.a @ x + prob.b @ np.atleast_1d(u)

    dv0 = np.array([v_bar - 1.0])
    traj_opt = closed_loop_simulate(plant, law, dv0, sim_grid)
    j_opt = cost_eval(traj_opt, lambda t, x: law.gain(t) @ x, prob)

    du_c = constant_control(v_bar)
    traj_const = closed_loop_simulate(plant, du_c, dv0, sim_grid)
    j_const = cost_eval(traj_const, lambda t, x: np.array([du_c]), prob)
    return j_opt, j_const
