"""Dense real square-matrix kernel: commutators, determinant, exponential.

All routines operate on plain numpy float arrays and are pure functions;
matrices are never mutated in place.
"""

import numpy as np

__all__ = [
    "as_square_matrix",
    "commutator",
    "expm",
    "det",
    "frobenius",
    "DimensionMismatch",
]

# relative term-size cutoff for the exponential Taylor series
_EXPM_TOL = 1e-16


class DimensionMismatch(ValueError):
    """Raised when two matrices of incompatible shapes are combined."""


def as_square_matrix(a) -> np.ndarray:
    """Validate and return `a` as an n x n float64 array.

    Rejects non-square shapes and non-finite entries.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm, the canonical matrix norm throughout the package."""
    return float(np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2)))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix commutator [a, b] = a b - b a."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return a @ b - b @ a


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring of the Taylor series.

    The argument is scaled by 2**-s until its Frobenius norm is at most
    0.5, the series is summed until the current term is negligible
    relative to the partial sum, and the result is squared s times.
    Exact (up to roundoff) for nilpotent input, where the series
    terminates.
    """
    a = as_square_matrix(a)
    n = a.shape[0]

    norm = frobenius(a)
    s = 0
    if norm > 0.5:
        s = int(np.ceil(np.log2(norm / 0.5)))
        a = a / (2.0**s)

    result = np.eye(n)
    term = np.eye(n)
    k = 1
    while True:
        term = term @ a / k
        result = result + term
        if frobenius(term) <= _EXPM_TOL * frobenius(result):
            break
        k += 1

    for _ in range(s):
        result = result @ result
    return result


def det(a) -> float:
    """Determinant via LU factorization with partial pivoting.

    Returns 0.0 when a pivot falls below 1e-14 times the input norm.
    """
    a = as_square_matrix(a).copy()
    n = a.shape[0]
    tol = 1e-14 * max(frobenius(a), 1e-300)

    sign = 1.0
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot_row, col]) <= tol:
            return 0.0
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            sign = -sign
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])

    return float(sign * np.prod(np.diag(a)))
