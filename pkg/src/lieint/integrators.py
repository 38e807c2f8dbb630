"""One-step integrators: classical Heun/RK4 on vectors and the Lie-group
steppers (Magnus order 2 and 4, RKMK4) with per-step re-centering.

The group steppers produce the step increment Omega_k in the algebra;
the group update is always Y_{k+1} = expm(Omega_k) Y_k, which keeps the
trajectory on the group and the exponential chart near the origin.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .matkit import commutator, expm, frobenius

__all__ = [
    "TimeGrid",
    "MatrixPath",
    "ButcherTable",
    "RK4_TABLE",
    "GROUP_SCHEMES",
    "heun_step",
    "rk4_step",
    "magnus2_omega",
    "magnus4_omega",
    "rkmk4_omega",
    "magnus2_step",
    "magnus4_step",
    "rkmk4_step",
    "step_increment",
    "integrate_group",
    "check_magnus_bound",
    "estimate_order",
]

# radius within which the Magnus series is guaranteed to converge:
# int_0^{2 pi} dxi / (4 + xi (1 - cot(xi / 2)))
MAGNUS_BOUND = 1.086868702

GROUP_SCHEMES = ("magnus2", "magnus4", "rkmk4")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of N steps on [a, b]."""

    a: float
    b: float
    steps: int

    def __post_init__(self):
        if self.b <= self.a:
            raise ValueError(f"need b > a, got [{self.a}, {self.b}]")
        if self.steps < 1:
            raise ValueError(f"need at least one step, got {self.steps}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.steps

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.steps + 1)

    @staticmethod
    def from_step(a: float, b: float, h: float) -> "TimeGrid":
        """Grid with step closest to h that lands exactly on b."""
        steps = max(1, round((b - a) / h))
        return TimeGrid(a, b, steps)


@dataclass(frozen=True)
class MatrixPath:
    """A t-dependent algebra element A(t) with optional analytic
    derivatives.

    When the derivatives needed by the fourth-order Magnus step are not
    supplied, central finite differences are used unless `fd_fallback`
    is disabled.
    """

    evaluate: Callable[[float], np.ndarray]
    n: int
    derivative1: Optional[Callable[[float], np.ndarray]] = None
    derivative2: Optional[Callable[[float], np.ndarray]] = None
    fd_fallback: bool = True

    def __call__(self, t: float) -> np.ndarray:
        return self.evaluate(t)

    def d1(self, t: float, delta: float = 1e-5) -> np.ndarray:
        if self.derivative1 is not None:
            return self.derivative1(t)
        if not self.fd_fallback:
            raise ValueError("first derivative unavailable and finite-difference fallback disabled")
        return (self.evaluate(t + delta) - self.evaluate(t - delta)) / (2.0 * delta)

    def d2(self, t: float, delta: float = 1e-5) -> np.ndarray:
        if self.derivative2 is not None:
            return self.derivative2(t)
        if not self.fd_fallback:
            raise ValueError("second derivative unavailable and finite-difference fallback disabled")
        return (
            self.evaluate(t + delta) - 2.0 * self.evaluate(t) + self.evaluate(t - delta)
        ) / delta**2


@dataclass(frozen=True)
class ButcherTable:
    """Coefficients of an explicit Runge-Kutta scheme."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        if abs(float(np.sum(self.b)) - 1.0) > 1e-14:
            raise ValueError("inconsistent table: weights must sum to 1")

    @property
    def stages(self) -> int:
        return len(self.b)


RK4_TABLE = ButcherTable(
    a=np.array([
        [0.0, 0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ]),
    b=np.array([1.0, 2.0, 2.0, 1.0]) / 6.0,
    c=np.array([0.0, 0.5, 0.5, 1.0]),
)


def heun_step(f, t: float, x: np.ndarray, h: float) -> np.ndarray:
    """Heun (explicit trapezoidal) update, order 2."""
    k1 = f(t, x)
    k2 = f(t + h, x + h * k1)
    return x + 0.5 * h * (k1 + k2)


def rk4_step(f, t: float, x: np.ndarray, h: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta update."""
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = f(t + h, x + h * k3)
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def magnus2_omega(a_path: MatrixPath, t_k: float, h: float) -> np.ndarray:
    """Midpoint (order-2 Magnus) increment h A(t_k + h/2)."""
    return h * a_path(t_k + 0.5 * h)


def magnus4_omega(a_path: MatrixPath, t_k: float, h: float) -> np.ndarray:
    """Fourth-order Magnus increment from the Taylor form of A around
    the step midpoint:

        Omega = h a0 + h^3 (a2 - [a0, a1]),
        a0 = A(t_half), a1 = A'(t_half)/12, a2 = A''(t_half)/24.
    """
    t_half = t_k + 0.5 * h
    delta = max(1e-5, 1e-2 * h)
    a0 = a_path(t_half)
    a1 = a_path.d1(t_half, delta) / 12.0
    a2 = a_path.d2(t_half, delta) / 24.0
    return h * a0 + h**3 * (a2 - commutator(a0, a1))


def rkmk4_omega(a_path: MatrixPath, t_k: float, h: float, order_j: int = 2) -> np.ndarray:
    """RKMK increment for the classical RK4 table; the dexp-inverse
    series is truncated at order 2, sufficient for order 4."""
    from .lie_core import dexp_inv

    zero = np.zeros((a_path.n, a_path.n))
    f1 = dexp_inv(zero, a_path(t_k), order_j)
    f2 = dexp_inv(0.5 * h * f1, a_path(t_k + 0.5 * h), order_j)
    f3 = dexp_inv(0.5 * h * f2, a_path(t_k + 0.5 * h), order_j)
    f4 = dexp_inv(h * f3, a_path(t_k + h), order_j)
    return h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)


_OMEGA_FUNCS = {
    "magnus2": magnus2_omega,
    "magnus4": magnus4_omega,
    "rkmk4": rkmk4_omega,
}


def step_increment(scheme: str, a_path: MatrixPath, t_k: float, h: float) -> np.ndarray:
    """Algebra increment Omega_k of the named group scheme."""
    try:
        omega_func = _OMEGA_FUNCS[scheme]
    except KeyError:
        raise ValueError(f"unknown group scheme {scheme!r}; pick one of {GROUP_SCHEMES}")
    return omega_func(a_path, t_k, h)


def magnus2_step(a_path: MatrixPath, t_k: float, h: float, y_k: np.ndarray) -> np.ndarray:
    return expm(magnus2_omega(a_path, t_k, h)) @ y_k


def magnus4_step(a_path: MatrixPath, t_k: float, h: float, y_k: np.ndarray) -> np.ndarray:
    return expm(magnus4_omega(a_path, t_k, h)) @ y_k


def rkmk4_step(a_path: MatrixPath, t_k: float, h: float, y_k: np.ndarray) -> np.ndarray:
    return expm(rkmk4_omega(a_path, t_k, h)) @ y_k


def integrate_group(scheme: str, a_path: MatrixPath, grid: TimeGrid) -> list:
    """Group trajectory Y_0 = I, Y_{k+1} = expm(Omega_k) Y_k.

    Re-centering at every step keeps the algebra increment near zero,
    so the exponential chart stays valid along the whole run.
    """
    y = np.eye(a_path.n)
    path = [y]
    h = grid.h
    for t_k in grid.nodes[:-1]:
        y = expm(step_increment(scheme, a_path, t_k, h)) @ y
        path.append(y)
    return path


def check_magnus_bound(a_path: MatrixPath, t: float, t0: float = 0.0) -> bool:
    """Whether the Magnus convergence criterion
    int_{t0}^{t} ||A|| dxi <= 1.086868702 holds (composite Simpson,
    1000 panels).

    Advisory only: re-centering lets the steppers integrate well past
    this radius.
    """
    if t <= t0:
        return True
    panels = 1000
    xs = np.linspace(t0, t, 2 * panels + 1)
    vals = np.array([frobenius(a_path(x)) for x in xs])
    w = xs[1] - xs[0]
    integral = w / 3.0 * (vals[0] + vals[-1] + 4.0 * np.sum(vals[1:-1:2]) + 2.0 * np.sum(vals[2:-1:2]))
    return bool(integral <= MAGNUS_BOUND)


def estimate_order(h_values: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    h_arr = np.asarray(h_values, dtype=float)
    e_arr = np.asarray(errors, dtype=float)
    if len(h_arr) < 3 or len(h_arr) != len(e_arr):
        raise ValueError("need at least 3 matching (h, error) pairs")
    if np.any(h_arr <= 0) or np.any(e_arr <= 0):
        raise ValueError("step sizes and errors must be positive")
    slope, _ = np.polyfit(np.log(h_arr), np.log(e_arr), 1)
    return float(slope)
