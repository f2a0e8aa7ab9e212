"""Dense linear-algebra kernels shared by the synthesis and design modules.

Thin, contract-checked wrappers around LAPACK (via numpy): descending-ordered
symmetric eigendecomposition, dominant singular triplet with deterministic
phase pinning, and the spectral norm. All functions are pure and reentrant.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidInputError

__all__ = [
    "EigenResult",
    "SvdTriplet",
    "sym_eig_desc",
    "eigh_desc_batch",
    "dominant_svd",
    "spectral_norm",
]


@dataclass(frozen=True)
class EigenResult:
    """Eigendecomposition of a real symmetric matrix, eigenvalues descending.

    eigenvectors[:, k] is the unit eigenvector for eigenvalues[k]; the
    eigenvector matrix is orthonormal and ``U @ diag(vals) @ U.T``
    reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class SvdTriplet:
    """Dominant singular triplet: ``M @ v == sigma * u``.

    The common phase of (u, v) is pinned so the first significant entry of v
    is real nonnegative. Callers must not rely on any other phase convention.
    """

    sigma: float
    u: np.ndarray
    v: np.ndarray


def sym_eig_desc(m: np.ndarray) -> EigenResult:
    """Eigendecomposition of a real symmetric matrix, descending order.

    The input is symmetrized defensively; ties keep the (deterministic)
    LAPACK ordering reversed.

    Raises
    ------
    InvalidInputError
        If the matrix is not square real or contains non-finite entries.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix contains non-finite entries")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    return EigenResult(eigenvalues=vals[::-1].copy(), eigenvectors=vecs[:, ::-1].copy())


def eigh_desc_batch(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched descending eigendecomposition of symmetric matrices (B, N, N).

    Returns (values (B, N), vectors (B, N, N)); no defensive symmetrization,
    callers own the preconditions. Outputs are contiguous: reversed views
    carry negative strides that would push later matmuls off the BLAS path.
    """
    vals, vecs = np.linalg.eigh(a)
    return np.ascontiguousarray(vals[:, ::-1]), np.ascontiguousarray(vecs[:, :, ::-1])


def _pin_common_phase(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Rotate both vectors by the same unit scalar; M v = sigma u is preserved.
    idx = int(np.argmax(np.abs(v) > 1e-12))
    ref = v[idx]
    phase = ref / abs(ref) if abs(ref) > 0 else 1.0
    return u * np.conj(phase), v * np.conj(phase)


def dominant_svd(m: np.ndarray) -> SvdTriplet:
    """Dominant singular value and left/right singular vectors of a matrix.

    Parameters
    ----------
    m : complex matrix, any shape (m, n), nonzero.

    Raises
    ------
    DegenerateInputError
        If the matrix is identically zero (singular vectors undefined).
    InvalidInputError
        On non-finite entries.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix contains non-finite entries")
    if not np.any(m):
        raise DegenerateInputError("dominant singular vectors of the zero matrix are undefined")
    u_mat, s, vh = np.linalg.svd(m, full_matrices=False)
    u, v = _pin_common_phase(u_mat[:, 0], vh[0].conj())
    return SvdTriplet(sigma=float(s[0]), u=u, v=v)


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value; 0.0 for an all-zero matrix."""
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix contains non-finite entries")
    if not np.any(m):
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])
