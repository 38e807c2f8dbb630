"""Lie-algebra bases with structure constants, Bernoulli numbers and the
truncated inverse differential of the exponential map.

Structure constants are stored for the vector-field algebra,
[X_a, X_b] = sum_c C[a, b, c] X_c.  The matrix generators realize the
opposite sign, [M_a, M_b] = -sum_c C[a, b, c] M_c; this anti-isomorphism
is what ties a system on the manifold to its lift on the group.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .matkit import DimensionMismatch, commutator

__all__ = [
    "LieAlgebraBasis",
    "bernoulli",
    "dexp_inv",
    "sl2_basis",
    "sl3_basis",
    "sln_basis",
]

_BERNOULLI_MAX = 20


@dataclass(frozen=True)
class LieAlgebraBasis:
    """Ordered matrix generators together with vector-field structure
    constants.

    Attributes:
        name: label such as "sl2" or "sl4".
        r: dimension of the algebra (number of generators).
        n: size of the generator matrices.
        generators: tuple of r arrays of shape (n, n).
        structure_constants: array of shape (r, r, r); entry [a, b, c]
            is the coefficient of X_c in [X_a, X_b].
    """

    name: str
    r: int
    n: int
    generators: tuple
    structure_constants: np.ndarray

    def matrix_commutator_residual(self) -> float:
        """Max-norm residual of [M_a, M_b] + sum_c C[a,b,c] M_c over all
        generator pairs.  Zero (to roundoff) for a consistent basis."""
        worst = 0.0
        for a in range(self.r):
            for b in range(self.r):
                lhs = commutator(self.generators[a], self.generators[b])
                rhs = -sum(
                    self.structure_constants[a, b, c] * self.generators[c]
                    for c in range(self.r)
                )
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst


@lru_cache(maxsize=None)
def _bernoulli_fraction(j: int) -> Fraction:
    # standard recurrence sum_{k=0}^{m} C(m+1, k) B_k = 0, with the
    # B_1 = -1/2 convention (B_1 enters the dexp-inverse series with a
    # minus sign)
    if j == 0:
        return Fraction(1)
    total = Fraction(0)
    for k in range(j):
        total += comb(j + 1, k) * _bernoulli_fraction(k)
    return -total / (j + 1)


def bernoulli(j: int) -> float:
    """The j-th Bernoulli number (B_1 = -1/2 convention) as a float."""
    if not 0 <= j <= _BERNOULLI_MAX:
        raise ValueError(f"j must be in [0, {_BERNOULLI_MAX}], got {j}")
    return float(_bernoulli_fraction(j))


def dexp_inv(omega: np.ndarray, h: np.ndarray, order_j: int) -> np.ndarray:
    """Truncation of dexp^-1_omega(h) = sum_k (B_k / k!) ad_omega^k(h).

    The order-2 truncation h - [omega, h]/2 + [omega, [omega, h]]/12 is
    sufficient for the fourth-order steppers.
    """
    omega = np.asarray(omega, dtype=float)
    h = np.asarray(h, dtype=float)
    if omega.shape != h.shape:
        raise DimensionMismatch(f"shapes {omega.shape} and {h.shape} differ")
    if not 0 <= order_j <= 10:
        raise ValueError(f"order_j must be in [0, 10], got {order_j}")

    result = h.copy()
    ad_term = h
    for k in range(1, order_j + 1):
        ad_term = commutator(omega, ad_term)
        coeff = bernoulli(k) / factorial(k)
        if coeff != 0.0:
            result = result + coeff * ad_term
    return result


def sl2_basis() -> LieAlgebraBasis:
    """Basis of sl(2, R) adapted to the scalar Riccati equation.

    Generators pair with the vector fields d/dx, x d/dx, x^2 d/dx, whose
    commutators are [X_0, X_1] = X_0, [X_0, X_2] = 2 X_1,
    [X_1, X_2] = X_2.
    """
    m0 = np.array([[0.0, 1.0], [0.0, 0.0]])
    m1 = np.array([[0.5, 0.0], [0.0, -0.5]])
    m2 = np.array([[0.0, 0.0], [-1.0, 0.0]])

    c = np.zeros((3, 3, 3))
    c[0, 1, 0] = 1.0
    c[0, 2, 1] = 2.0
    c[1, 2, 2] = 1.0
    c -= np.transpose(c, (1, 0, 2))
    return LieAlgebraBasis("sl2", 3, 2, (m0, m1, m2), c)


def sl3_basis() -> LieAlgebraBasis:
    """Basis of sl(3, R) adapted to the planar matrix Riccati equation.

    The eight vector fields are d/dx, d/dy, x d/dx, y d/dy, y d/dx,
    x d/dy, x^2 d/dx + xy d/dy, xy d/dx + y^2 d/dy, in this order.
    """
    z = np.zeros((3, 3))

    def e(i, j, v=1.0):
        m = z.copy()
        m[i, j] = v
        return m

    m1 = e(2, 0, -1.0)
    m2 = e(2, 1, -1.0)
    m3 = np.diag([2.0, -1.0, -1.0]) / 3.0
    m4 = np.diag([-1.0, 2.0, -1.0]) / 3.0
    m5 = e(1, 0)
    m6 = e(0, 1)
    m7 = e(0, 2)
    m8 = e(1, 2)
    gens = (m1, m2, m3, m4, m5, m6, m7, m8)

    # non-vanishing vector-field commutators, 0-based indices
    table = {
        (0, 2): {0: 1.0},
        (0, 5): {1: 1.0},
        (0, 6): {2: 2.0, 3: 1.0},
        (0, 7): {4: 1.0},
        (1, 3): {1: 1.0},
        (1, 4): {0: 1.0},
        (1, 6): {5: 1.0},
        (1, 7): {2: 1.0, 3: 2.0},
        (2, 4): {4: -1.0},
        (2, 5): {5: 1.0},
        (2, 6): {6: 1.0},
        (3, 4): {4: 1.0},
        (3, 5): {5: -1.0},
        (3, 7): {7: 1.0},
        (4, 5): {2: -1.0, 3: 1.0},
        (4, 6): {7: 1.0},
        (5, 7): {6: 1.0},
    }
    c = np.zeros((8, 8, 8))
    for (a, b), coeffs in table.items():
        for g, v in coeffs.items():
            c[a, b, g] = v
    c -= np.transpose(c, (1, 0, 2))
    return LieAlgebraBasis("sl3", 8, 3, gens, c)


def sln_basis(n: int) -> LieAlgebraBasis:
    """Generic basis of sl(n, R): the n^2 - n single off-diagonal unit
    matrices followed by the n - 1 diagonal matrices diag(1, 0, ..,
    -1, .., 0).

    Structure constants are computed from the matrix commutators and
    stored with the sign flipped, so the vector-field convention holds
    by construction.
    """
    if not 2 <= n <= 8:
        raise ValueError(f"n must be in [2, 8], got {n}")

    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                m = np.zeros((n, n))
                m[i, j] = 1.0
                gens.append(m)
    for k in range(1, n):
        m = np.zeros((n, n))
        m[0, 0] = 1.0
        m[k, k] = -1.0
        gens.append(m)

    r = n * n - 1
    # expand each commutator over the basis by least squares on the
    # vectorized generators
    basis_mat = np.stack([g.ravel() for g in gens], axis=1)
    c = np.zeros((r, r, r))
    for a in range(r):
        for b in range(a + 1, r):
            rhs = commutator(gens[a], gens[b]).ravel()
            coeffs, *_ = np.linalg.lstsq(basis_mat, rhs, rcond=None)
            c[a, b] = -coeffs
            c[b, a] = coeffs
    return LieAlgebraBasis(f"sl{n}", r, n, tuple(gens), c)
