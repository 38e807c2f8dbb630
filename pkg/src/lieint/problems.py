"""Registry of the named benchmark problems: fixed coefficient paths,
default intervals/initial data, and exact reference solutions."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .actions import sl2_group_action, sl3_group_action
from .lie_core import sl2_basis, sl3_basis
from .liesys import (
    CoefficientPath,
    LieSystem,
    exact_const_riccati,
    exact_sl2_example,
    exact_sl3_example,
)

__all__ = ["Problem", "get_problem", "problem_names", "lqr_exact_value_function"]


@dataclass(frozen=True)
class Problem:
    """A benchmark instance: system, default window, initial state, and
    the exact solution when one is known."""

    name: str
    system: LieSystem
    a: float
    b: float
    x0: np.ndarray
    exact: Optional[Callable[[float], np.ndarray]] = None


def _riccati_sl2_const() -> Problem:
    basis = sl2_basis()
    b = np.array([1.0, 2.0, 1.0])
    zero = np.zeros(3)
    sys = LieSystem(
        name="riccati-sl2-const",
        basis=basis,
        coefficients=CoefficientPath(
            evaluate=lambda t: b,
            derivative1=lambda t: zero,
            derivative2=lambda t: zero,
        ),
        action=sl2_group_action(),
        manifold_dim=1,
        rhs=lambda t, x: 1.0 + 2.0 * x + x**2,
    )
    return Problem(
        name="riccati-sl2-const",
        system=sys,
        a=0.0,
        b=0.4,
        x0=np.array([0.0]),
        exact=lambda t: np.array([exact_const_riccati(t, 0.0)]),
    )


def _riccati_sl2() -> Problem:
    basis = sl2_basis()
    sys = LieSystem(
        name="riccati-sl2",
        basis=basis,
        coefficients=CoefficientPath(
            evaluate=lambda t: np.array([2.0 * t, -1.0 / t, 1.0 / t**3]),
            derivative1=lambda t: np.array([2.0, 1.0 / t**2, -3.0 / t**4]),
            derivative2=lambda t: np.array([0.0, -2.0 / t**3, 12.0 / t**5]),
        ),
        action=sl2_group_action(),
        manifold_dim=1,
        rhs=lambda t, x: 2.0 * t - x / t + x**2 / t**3,
    )
    return Problem(
        name="riccati-sl2",
        system=sys,
        a=1.0,
        b=10.0,
        x0=np.array([0.0]),
        exact=lambda t: np.array([exact_sl2_example(t)]),
    )


def _riccati_sl3() -> Problem:
    basis = sl3_basis()

    def coeffs(t):
        return np.array([
            5.0 * np.sin(10.0 * t),
            5.0 * np.cos(10.0 * t),
            -1.0, 1.0, 1.0, 1.0, 0.0, 0.0,
        ])

    def coeffs_d1(t):
        return np.array([
            50.0 * np.cos(10.0 * t),
            -50.0 * np.sin(10.0 * t),
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ])

    def coeffs_d2(t):
        return np.array([
            -500.0 * np.sin(10.0 * t),
            -500.0 * np.cos(10.0 * t),
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ])

    def rhs(t, p):
        x, y = p
        return np.array([
            5.0 * np.sin(10.0 * t) - x + y,
            5.0 * np.cos(10.0 * t) + x + y,
        ])

    sys = LieSystem(
        name="riccati-sl3",
        basis=basis,
        coefficients=CoefficientPath(coeffs, coeffs_d1, coeffs_d2),
        action=sl3_group_action(),
        manifold_dim=2,
        rhs=rhs,
    )
    return Problem(
        name="riccati-sl3",
        system=sys,
        a=0.0,
        b=1.0,
        x0=np.array([1.0, 0.0]),
        exact=exact_sl3_example,
    )


_SQRT5 = np.sqrt(5.0)


def lqr_exact_value_function(t: float) -> float:
    """Closed-form solution of dP/dt = P^2 + 4P - 1 with P(1) = 1."""
    num = (5.0 + _SQRT5) * np.exp(2.0 * _SQRT5 * t) + (5.0 - _SQRT5) * np.exp(2.0 * _SQRT5)
    den = (5.0 - 3.0 * _SQRT5) * np.exp(2.0 * _SQRT5 * t) + (5.0 + 3.0 * _SQRT5) * np.exp(2.0 * _SQRT5)
    return num / den


def _lqr_vehicle() -> Problem:
    """Backward Riccati equation of the cruise-control problem, posed
    forward in the reversed time tau = 1 - t: dP/dtau = -(P^2 + 4P - 1)
    from P(tau=0) = 1."""
    basis = sl2_basis()
    b = np.array([1.0, -4.0, -1.0])
    zero = np.zeros(3)
    sys = LieSystem(
        name="lqr-vehicle",
        basis=basis,
        coefficients=CoefficientPath(
            evaluate=lambda t: b,
            derivative1=lambda t: zero,
            derivative2=lambda t: zero,
        ),
        action=sl2_group_action(),
        manifold_dim=1,
        rhs=lambda t, x: -(x**2 + 4.0 * x - 1.0),
    )
    return Problem(
        name="lqr-vehicle",
        system=sys,
        a=0.0,
        b=1.0,
        x0=np.array([1.0]),
        exact=lambda tau: np.array([lqr_exact_value_function(1.0 - tau)]),
    )


_BUILDERS = {
    "riccati-sl2-const": _riccati_sl2_const,
    "riccati-sl2": _riccati_sl2,
    "riccati-sl3": _riccati_sl3,
    "lqr-vehicle": _lqr_vehicle,
}


def problem_names() -> list:
    return sorted(_BUILDERS)


def get_problem(name: str) -> Problem:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {', '.join(problem_names())}")
    return builder()
