"""Projection onto the Stiefel manifold and the spectral rescaling trick.

The nearest orthonormal-column matrix in Frobenius distance is the polar
factor U V' of a thin SVD; it is unique exactly when the input has full
column rank, so rank deficiency is reported as an error instead of being
resolved silently.  The ambient geometry is the trace inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUniqueProjectionError

__all__ = [
    "SVDResult",
    "StiefelPoint",
    "svd_thin",
    "project_stiefel",
    "spectral_rescale",
    "is_on_stiefel",
]

# relative rank guard: sigma_min must exceed this multiple of sigma_max
DEFAULT_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class SVDResult:
    """Thin SVD: U (m x p, orthonormal columns), sigma (nonincreasing), V (p x p)."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.U @ np.diag(self.sigma) @ self.V.T


@dataclass(frozen=True)
class StiefelPoint:
    """An m x p matrix with orthonormal columns."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", mat)
        gram = mat.T @ mat
        if float(np.max(np.abs(gram - np.eye(mat.shape[1])))) > 1e-10:
            raise ValueError("matrix columns are not orthonormal within 1e-10")

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]


def svd_thin(theta: np.ndarray) -> SVDResult:
    """Thin SVD with nonincreasing singular values."""
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    if not np.all(np.isfinite(theta)):
        raise ValueError("matrix entries must be finite")
    U, sigma, Vt = np.linalg.svd(theta, full_matrices=False)
    return SVDResult(U=U, sigma=sigma, V=Vt.T)


def project_stiefel(theta: np.ndarray, rank_tol: float | None = None) -> StiefelPoint:
    """Nearest orthonormal-frame matrix (polar factor U V') in Frobenius norm.

    ``rank_tol`` bounds the smallest acceptable singular value; by default it
    is 1e-10 times the largest one.  At or below the bound the nearest point
    is not unique and NonUniqueProjectionError is raised.
    """
    decomp = svd_thin(theta)
    sigma_max = float(decomp.sigma[0]) if decomp.sigma.size else 0.0
    sigma_min = float(decomp.sigma[-1]) if decomp.sigma.size else 0.0
    if rank_tol is None:
        rank_tol = DEFAULT_RANK_RTOL * sigma_max
    if sigma_min <= rank_tol:
        raise NonUniqueProjectionError(
            f"projection is not unique: smallest singular value {sigma_min:.3e} "
            f"is within the rank guard {rank_tol:.3e}"
        )
    return StiefelPoint(matrix=decomp.U @ decomp.V.T)


def spectral_rescale(U: np.ndarray, Lambda: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Divide U by its spectral norm and scale Lambda by the square.

    ``Lambda`` may be a vector of diagonal entries (p,), a diagonal matrix
    (p, p), or a stack of either with a leading batch axis (one weight
    matrix per item).  Bilinear forms u' Lambda u are unchanged.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    spectral = float(np.linalg.norm(U, ord=2))
    if spectral == 0.0:
        raise ValueError("spectral norm is zero; nothing to rescale")
    Lambda = np.asarray(Lambda, dtype=float)
    p = U.shape[1]
    if Lambda.ndim >= 2 and Lambda.shape[-2:] == (p, p):
        off_diag = Lambda - Lambda * np.eye(p)
        if float(np.max(np.abs(off_diag))) > 0.0:
            raise ValueError("Lambda must be diagonal")
    elif Lambda.shape[-1] != p:
        raise ValueError(f"Lambda trailing dimension must be {p}, got {Lambda.shape}")
    return U / spectral, Lambda * spectral**2


def is_on_stiefel(theta: np.ndarray, tol: float = 1e-10) -> bool:
    """True when theta' theta is the identity within ``tol`` in max norm."""
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    gram = theta.T @ theta
    return float(np.max(np.abs(gram - np.eye(theta.shape[1])))) <= tol
