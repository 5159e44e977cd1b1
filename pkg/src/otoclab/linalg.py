"""Dense complex matrix helpers for two-qubit operators and their purifications.

Plain ``numpy`` arithmetic behind explicit contracts: finite entries, hard
dimension checks, and an exact exponential for diagonal Hermitian generators
(the only matrix exponential this package ever needs).
"""

from __future__ import annotations

import numpy as np

# Absolute comparison tolerance used package-wide unless a caller overrides it.
DEFAULT_ATOL = 1e-10

# Largest off-diagonal magnitude accepted by exp_diag_hermitian.
DIAGONAL_ATOL = 1e-12

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

I2.setflags(write=False)
I4.setflags(write=False)
SIGMA_X.setflags(write=False)
SIGMA_Y.setflags(write=False)
SIGMA_Z.setflags(write=False)


class NotDiagonalError(ValueError):
    """Raised when exp_diag_hermitian receives significant off-diagonal weight."""


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite square complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_vector(v) -> np.ndarray:
    """Coerce ``v`` to a finite complex 1-D vector."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    return a


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit dimension check."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def kron(a, b) -> np.ndarray:
    """Kronecker product; block (i, j) of the result equals a[i, j] * b."""
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def trace(a) -> complex:
    """Sum of the diagonal entries."""
    return complex(np.trace(as_matrix(a)))


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a + b


def subtract(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a - b


def scale(a, factor: complex) -> np.ndarray:
    return as_matrix(a) * complex(factor)


def conjugate_entrywise(a) -> np.ndarray:
    """Entrywise complex conjugate (no transpose)."""
    return np.conj(as_matrix(a))


def outer_product(u, v) -> np.ndarray:
    """Rank-one matrix |u><v|."""
    u, v = as_vector(u), as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return np.outer(u, v.conj())


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a)))


def is_hermitian(a, atol: float = DEFAULT_ATOL) -> bool:
    a = as_matrix(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= atol)


def is_unitary(a, atol: float = DEFAULT_ATOL) -> bool:
    a = as_matrix(a)
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= atol)


def exp_diag_hermitian(h, scale: complex, atol: float = DIAGONAL_ATOL) -> np.ndarray:
    """Exact exponential exp(scale * h) for a diagonal Hermitian matrix.

    ``h`` must be diagonal with real diagonal entries to within ``atol``;
    anything else raises :class:`NotDiagonalError`. No series truncation is
    involved: the result is ``diag(exp(scale * h[i, i]))``.
    """
    h = as_matrix(h)
    diag = np.diag(h)
    off = h - np.diag(diag)
    worst = max(np.max(np.abs(off)), np.max(np.abs(diag.imag)))
    if worst > atol:
        raise NotDiagonalError(
            f"matrix is not real-diagonal: max off-diagonal/imaginary magnitude {worst:.3e} "
            f"exceeds tolerance {atol:.3e}"
        )
    return np.diag(np.exp(complex(scale) * diag.real))


def partial_trace_b(m, dim_a: int, dim_b: int) -> np.ndarray:
    """Trace out the second tensor factor of a (dim_a*dim_b)-dimensional operator.

    Index convention matches :func:`kron`: result[i, j] = sum_k m[i*dim_b + k, j*dim_b + k].
    """
    m = as_matrix(m)
    if dim_a <= 0 or dim_b <= 0 or m.shape[0] != dim_a * dim_b:
        raise ValueError(
            f"dimension factorization mismatch: {m.shape[0]} != {dim_a} * {dim_b}"
        )
    return np.einsum("ikjk->ij", m.reshape(dim_a, dim_b, dim_a, dim_b))
