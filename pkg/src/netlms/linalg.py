"""Small dense-matrix layer used by every other module.

Everything here operates on plain 2-D float64 numpy arrays.  Inputs are
validated at the boundary (shape and finiteness) so the numerical code
above this layer never sees NaN or Inf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SymEigenResult",
    "as_matrix",
    "laplacian",
    "symmetrize",
    "sym_eigenvalues",
    "kron",
    "block_diag",
    "spectral_norm",
]

from .errors import InvalidInputError


def as_matrix(a, name: str = "matrix", square: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float64 array, validating shape."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains NaN or Inf")
    if square and m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class SymEigenResult:
    """Eigenvalues of a symmetric matrix, ascending, with the backward-error
    scale ``tolerance`` at which residual checks are meaningful."""

    eigenvalues: np.ndarray
    tolerance: float


def laplacian(adjacency) -> np.ndarray:
    """Weighted digraph Laplacian ``L = D - A`` with ``D = diag(row sums)``.

    Rows index receivers: ``A[i, j]`` is the weight node ``i`` places on the
    link from node ``j``.  The diagonal of ``A`` must be exactly zero
    (no self-loops).
    """
    a = as_matrix(adjacency, "adjacency", square=True)
    d = np.diagonal(a)
    if a.size and np.any(d != 0.0):
        raise InvalidInputError("adjacency has nonzero diagonal entries")
    return np.diag(a.sum(axis=1)) - a


def symmetrize(a) -> np.ndarray:
    """Symmetric part ``(A + A^T) / 2`` of a square matrix."""
    m = as_matrix(a, "matrix", square=True)
    return 0.5 * (m + m.T)


def sym_eigenvalues(s) -> SymEigenResult:
    """All eigenvalues of a symmetric matrix, ascending.

    The input must be symmetric up to a small absolute skew; anything with
    ``|A - A^T|`` beyond ``1e-10 * max(1, |A|)`` is rejected rather than
    silently symmetrized.
    """
    m = as_matrix(s, "matrix", square=True)
    scale = max(1.0, float(np.abs(m).max()) if m.size else 0.0)
    if m.size and float(np.abs(m - m.T).max()) > 1e-10 * scale:
        raise InvalidInputError("matrix is not symmetric")
    vals = np.linalg.eigvalsh(m)
    tol = np.finfo(float).eps * max(1, m.shape[0]) * max(1.0, float(np.abs(vals).max()) if vals.size else 0.0)
    return SymEigenResult(eigenvalues=vals, tolerance=tol)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def block_diag(blocks) -> np.ndarray:
    """Stack matrices along the diagonal; off-diagonal blocks are zero.

    Blocks may be rectangular with differing shapes, e.g. per-node
    observation matrices of sizes ``(2, 3), (3, 3), (3, 3)`` stack to an
    ``8 x 9`` matrix.
    """
    mats = [as_matrix(b, f"block {i}") for i, b in enumerate(blocks)]
    if not mats:
        return np.zeros((0, 0))
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols))
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def spectral_norm(a) -> float:
    """Largest singular value, computed as sqrt of the top eigenvalue of A^T A."""
    m = as_matrix(a, "matrix")
    if m.size == 0:
        return 0.0
    gram = m.T @ m
    top = float(sym_eigenvalues(0.5 * (gram + gram.T)).eigenvalues[-1])
    return float(np.sqrt(max(top, 0.0)))
