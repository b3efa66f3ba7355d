"""Dense matrix helpers.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. The helpers
validate shapes and finiteness and otherwise defer to numpy/LAPACK.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, NumericFailure

DEFAULT_PINV_TOL = 1e-12


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float64 array (read-only view)."""
    m = np.array(a, dtype=np.float64, copy=True)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    m.setflags(write=False)
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n)


def transpose(a) -> np.ndarray:
    return as_matrix(a).T


def matmul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise InvalidInputError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def mat_vec(a, x) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if a.ndim != 2 or x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise InvalidInputError(f"cannot apply shape {a.shape} to vector of shape {x.shape}")
    return a @ x


def trace(a) -> float:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"trace requires a square matrix, got shape {a.shape}")
    return float(np.trace(a))


def frobenius(a) -> float:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise InvalidInputError(f"frobenius requires a 2-D array, got shape {a.shape}")
    return float(np.sqrt(np.sum(a * a)))


def pseudo_inverse(a, tol: float = DEFAULT_PINV_TOL) -> np.ndarray:
    """Moore-Penrose inverse via the SVD.

    Singular values below ``tol * sigma_max`` are treated as zero.
    """
    if not 0.0 < tol < 1.0:
        raise InvalidInputError(f"tol must lie in (0, 1), got {tol}")
    a = as_matrix(a)
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"SVD did not converge: {exc}") from exc
    if s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]))
    keep = s > tol * s[0]
    return (vt[keep].T / s[keep]) @ u[:, keep].T
