"""Group actions of SL(n, R) on R^{n-1} built from homographies, the
flows of the basis vector fields, and the extraction of second-kind
canonical coordinates.

All actions are only defined on a single chart around the identity; a
projective pole or a failed coordinate extraction means the trajectory
left the chart, and is reported as a ChartViolation rather than
propagated as Inf.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matkit import expm

__all__ = [
    "ChartViolation",
    "GroupAction",
    "sl2_action",
    "sl2_lambda_from_matrix",
    "sl2_flow",
    "sl3_action",
    "sl3_lambda_from_matrix",
    "sl3_flow",
    "sln_action",
    "sl2_group_action",
    "sl3_group_action",
    "sln_group_action",
    "fundamental_field",
]

# denominators and log arguments must clear this threshold
_CHART_TOL = 1e-12


class ChartViolation(ValueError):
    """The group element or manifold point left the second-kind chart
    (projective pole, nonpositive log argument, vanishing pivot)."""


@dataclass(frozen=True)
class GroupAction:
    """A left action of a matrix group on R^d."""

    group_dim: int
    manifold_dim: int
    apply: Callable[[np.ndarray, np.ndarray], np.ndarray]


def sl2_action(y: np.ndarray, x0: float) -> float:
    """Homography (alpha x + beta) / (gamma x + delta) for
    y = [[alpha, beta], [gamma, delta]]."""
    alpha, beta = y[0]
    gamma, delta = y[1]
    denom = gamma * x0 + delta
    if abs(denom) <= _CHART_TOL:
        raise ChartViolation(f"homography pole: gamma*x + delta = {denom:.3e}")
    return (alpha * x0 + beta) / denom


def sl2_lambda_from_matrix(y: np.ndarray) -> np.ndarray:
    """Second-kind coordinates (lambda_0, lambda_1, lambda_2) of a
    2 x 2 unimodular matrix, from the factorization
    Y = exp(l0 M0) exp(l1 M1) exp(l2 M2)."""
    beta = y[0, 1]
    gamma, delta = y[1]
    if delta <= _CHART_TOL:
        raise ChartViolation(f"outside chart: delta = {delta:.3e} must be positive")
    return np.array([beta / delta, -2.0 * np.log(delta), -gamma / delta])


def sl2_flow(index: int, lam: float, x0: float) -> float:
    """Flow of the Riccati basis field with the given index:
    translation, scaling, or the projective flow x / (1 - lam x)."""
    if index == 0:
        return lam + x0
    if index == 1:
        return x0 * np.exp(lam)
    if index == 2:
        denom = 1.0 - lam * x0
        if abs(denom) <= _CHART_TOL:
            raise ChartViolation(f"projective pole: 1 - lam*x = {denom:.3e}")
        return x0 / denom
    raise ValueError(f"flow index must be 0, 1 or 2, got {index}")


def sl3_lambda_from_matrix(y: np.ndarray) -> np.ndarray:
    """Second-kind coordinates (lambda_1 .. lambda_8) of a 3 x 3
    unimodular matrix for the ordered product of the eight basis
    exponentials."""
    y11, y12, y13 = y[0]
    y21, y22, y23 = y[1]
    y31, y32, _ = y[2]

    d = y12 * y21 - y11 * y22
    if abs(y11) <= _CHART_TOL or abs(d) <= _CHART_TOL:
        raise ChartViolation("outside chart: vanishing pivot in coordinate extraction")
    exp_l3 = -y11 * d
    exp_l4 = d * d / y11
    if exp_l3 <= _CHART_TOL or exp_l4 <= _CHART_TOL:
        raise ChartViolation("outside chart: nonpositive log argument")

    return np.array([
        (y22 * y31 - y21 * y32) / d,
        (y11 * y32 - y12 * y31) / d,
        np.log(exp_l3),
        np.log(exp_l4),
        -y11 * y21 / d,
        y12 / y11,
        (y12 * y23 - y13 * y22) / d,
        (y13 * y21 - y11 * y23) / d,
    ])


def _sl3_homography_coeffs(lam: np.ndarray) -> np.ndarray:
    l1, l2, l3, l4, l5, l6, l7, l8 = lam
    e3 = np.exp(l3)
    e4 = np.exp(l4)
    return np.array([
        [1.0, -l7, -l8],
        [l1, (1.0 + l5 * l6) * e3 - l1 * l7, l5 * e3 - l1 * l8],
        [l2, l6 * e4 - l2 * l7, e4 - l2 * l8],
    ])


def sl3_action(y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Planar homography action of a 3 x 3 unimodular matrix, assembled
    from its second-kind coordinates."""
    a = _sl3_homography_coeffs(sl3_lambda_from_matrix(y))
    x0, y0 = p
    denom = a[0, 0] + a[0, 1] * x0 + a[0, 2] * y0
    if abs(denom) <= _CHART_TOL:
        raise ChartViolation(f"homography pole: denominator = {denom:.3e}")
    return np.array([
        (a[1, 0] + a[1, 1] * x0 + a[1, 2] * y0) / denom,
        (a[2, 0] + a[2, 1] * x0 + a[2, 2] * y0) / denom,
    ])


def sl3_flow(index: int, lam: float, p: np.ndarray) -> np.ndarray:
    """Flow of the planar matrix-Riccati basis field with the given
    index (1-based): translations, scalings, shears, and the two
    projective flows."""
    x0, y0 = float(p[0]), float(p[1])
    if index == 1:
        return np.array([x0 + lam, y0])
    if index == 2:
        return np.array([x0, y0 + lam])
    if index == 3:
        return np.array([x0 * np.exp(lam), y0])
    if index == 4:
        return np.array([x0, y0 * np.exp(lam)])
    if index == 5:
        return np.array([x0 + y0 * lam, y0])
    if index == 6:
        return np.array([x0, y0 + x0 * lam])
    if index == 7:
        denom = 1.0 - x0 * lam
        if abs(denom) <= _CHART_TOL:
            raise ChartViolation(f"projective pole: 1 - x*lam = {denom:.3e}")
        return np.array([x0 / denom, y0 / denom])
    if index == 8:
        denom = 1.0 - y0 * lam
        if abs(denom) <= _CHART_TOL:
            raise ChartViolation(f"projective pole: 1 - y*lam = {denom:.3e}")
        return np.array([x0 / denom, y0 / denom])
    raise ValueError(f"flow index must be in 1..8, got {index}")


def sln_action(y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Homography action of an n x n unimodular matrix on R^{n-1}:
    x_i = <a_i, (1, p)> / <a_0, (1, p)> with a_i the rows of the
    matrix.

    Note the row convention differs from the 2 x 2 action above: the
    n = 2 case coincides with sl2_action applied to the matrix with
    both rows and columns reversed.
    """
    x_bar = np.concatenate(([1.0], np.asarray(p, dtype=float)))
    products = y @ x_bar
    if abs(products[0]) <= _CHART_TOL:
        raise ChartViolation(f"homography pole: denominator = {products[0]:.3e}")
    return products[1:] / products[0]


def sl2_group_action() -> GroupAction:
    def apply(y, p):
        return np.array([sl2_action(y, float(p[0]))])

    return GroupAction(group_dim=2, manifold_dim=1, apply=apply)


def sl3_group_action() -> GroupAction:
    return GroupAction(group_dim=3, manifold_dim=2, apply=sl3_action)


def sln_group_action(n: int) -> GroupAction:
    return GroupAction(group_dim=n, manifold_dim=n - 1, apply=sln_action)


def fundamental_field(action: GroupAction, m: np.ndarray, x: np.ndarray,
                      s: float = 1e-6) -> np.ndarray:
    """Fundamental vector field of the algebra element m at x, by a
    central difference of the action along exp(s m)."""
    forward = action.apply(expm(s * m), x)
    backward = action.apply(expm(-s * m), x)
    return (forward - backward) / (2.0 * s)
