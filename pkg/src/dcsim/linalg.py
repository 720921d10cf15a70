"""Deterministic dense linear algebra: truncated SVD, least squares, centering.

All routines work on float64 numpy arrays (row-major). Outputs are
deterministic given identical inputs, including a fixed sign convention
for singular vectors, so that downstream experiments are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

# Relative singular-value cutoff for the pseudoinverse.
PINV_RCOND = 1e-12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array, raising on bad input."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-D, got {a.ndim}-D")
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class TruncatedSvdResult:
    """Top-k singular triplets of a matrix.

    u: (n, k) left singular vectors, singular_values: (k,) non-increasing,
    v: (m, k) right singular vectors.
    """

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray


def _fix_signs(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Convention: first nonzero entry of each column of v is non-negative.
    u = u.copy()
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
            u[:, j] = -u[:, j]
    return u, v


def truncated_svd(a, k: int) -> TruncatedSvdResult:
    """Top-k singular value decomposition of a dense matrix.

    Raises InvalidArgumentError if k is outside [1, min(rows, cols)] or the
    input has non-finite entries.
    """
    a = as_matrix(a)
    if not isinstance(k, (int, np.integer)):
        raise InvalidArgumentError(f"k must be an integer, got {type(k).__name__}")
    if k < 1 or k > min(a.shape):
        raise InvalidArgumentError(
            f"k={k} out of range [1, {min(a.shape)}] for shape {a.shape}"
        )
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    u, v = _fix_signs(u[:, :k], vt[:k].T)
    return TruncatedSvdResult(u=u, singular_values=s[:k].copy(), v=v)


def solve_least_squares(a, b) -> np.ndarray:
    """Minimum-norm least-squares solution X of A X ~= B.

    Singular values below PINV_RCOND times the largest are treated as zero,
    so rank-deficient systems are handled stably.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise InvalidArgumentError(
            f"row mismatch: a has {a.shape[0]} rows, b has {b.shape[0]}"
        )
    x, _, _, _ = np.linalg.lstsq(a, b, rcond=PINV_RCOND)
    return x


def center_columns(a) -> tuple[np.ndarray, np.ndarray]:
    """Subtract each column's mean; returns (centered, mean)."""
    a = as_matrix(a)
    if a.shape[0] < 1:
        raise InvalidArgumentError("cannot center an empty matrix")
    mean = a.mean(axis=0)
    return a - mean, mean
