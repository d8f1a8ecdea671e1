"""Small dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every function
here is pure and returns a fresh array.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError, ValidationError

UNITARY_TOL = 1e-9
PROJECTOR_TOL = 1e-9


def cmatrix(rows) -> np.ndarray:
    """Build a finite complex matrix from nested rows."""
    a = np.array(rows, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("finite", "matrix contains NaN or inf entries")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def _require_square(a: np.ndarray, what: str = "matrix") -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {a.shape}")


def max_norm(a: np.ndarray) -> float:
    """Largest entry modulus; 0 for an empty matrix."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(a).T.copy()


def mat_power(a: np.ndarray, k: int) -> np.ndarray:
    _require_square(a)
    if k < 0:
        raise ValueError(f"power must be non-negative, got {k}")
    return np.linalg.matrix_power(np.asarray(a, dtype=np.complex128), k)


def unitarity_residual(a: np.ndarray) -> float:
    _require_square(a)
    return max_norm(a @ adjoint(a) - identity(a.shape[0]))


def is_unitary(a: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_residual(a) <= tol


def projector_residual(a: np.ndarray) -> float:
    """Max of the Hermiticity and idempotence residuals."""
    _require_square(a)
    return max(max_norm(a - adjoint(a)), max_norm(a @ a - a))


def is_projector(a: np.ndarray, tol: float = PROJECTOR_TOL) -> bool:
    return projector_residual(a) <= tol


def is_hermitian(a: np.ndarray, tol: float = PROJECTOR_TOL) -> bool:
    _require_square(a)
    return max_norm(a - adjoint(a)) <= tol


def hermitian_eigenvalues(a: np.ndarray, tol: float = PROJECTOR_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, in descending order."""
    _require_square(a)
    if a.shape[0] > 64:
        raise ShapeError(f"dimension {a.shape[0]} exceeds the supported maximum of 64")
    residual = max_norm(a - adjoint(a))
    if residual > tol:
        raise ValidationError("hermitian", f"matrix is not Hermitian (residual {residual:.3g})", residual)
    # symmetrize so eigvalsh sees exactly Hermitian input
    h = 0.5 * (a + adjoint(a))
    return np.linalg.eigvalsh(h)[::-1].copy()


def hadamard() -> np.ndarray:
    s = 1 / np.sqrt(2)
    return cmatrix([[s, s], [s, -s]])


def basis_projector(dim: int, indices) -> np.ndarray:
    """Diagonal projector onto the listed computational basis states."""
    p = np.zeros((dim, dim), dtype=np.complex128)
    for i in indices:
        if not 0 <= i < dim:
            raise ShapeError(f"basis index {i} out of range for dimension {dim}")
        p[i, i] = 1.0
    return p
