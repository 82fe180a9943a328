"""Comparison of reconstructions with ground truth."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .render import ImageStack
from .scene import HeightField, LightSet


def angular_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Column-wise angle between two ``3 x n`` arrays, in radians.

    Uses ``atan2(|a x b|, a . b)``, which stays accurate for tiny angles
    where ``arccos`` loses half the digits.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cross = np.linalg.norm(np.cross(a.T, b.T), axis=-1)
    dot = np.sum(a * b, axis=0)
    return np.arctan2(cross, dot)


@dataclass
class AlignmentResult:
    Q: np.ndarray
    max_error: float
    mean_error: float
    residual: float
    errors: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self.Q @ X


def procrustes_align(L_hat, L, proper: bool = False) -> AlignmentResult:
    """Orthogonal ``Q`` minimizing ``||Q L_hat - L||_F``, with angular errors after alignment.

    ``proper=True`` restricts ``Q`` to rotations (``det Q = +1``).
    """
    L_hat = L_hat.directions if isinstance(L_hat, LightSet) else np.asarray(L_hat, dtype=float)
    L = L.directions if isinstance(L, LightSet) else np.asarray(L, dtype=float)
    if L_hat.shape != L.shape or L.shape[0] != 3:
        raise InvalidArgumentError(f"light matrices differ in shape: {L_hat.shape} vs {L.shape}")
    if L.shape[1] < 3:
        raise InvalidArgumentError("alignment needs at least 3 lights")
    if not (np.all(np.isfinite(L_hat)) and np.all(np.isfinite(L))):
        raise InvalidArgumentError("light matrices must be finite")
    U, sv, Vt = np.linalg.svd(L @ L_hat.T)
    if sv[2] <= 1e-12 * sv[0]:
        warnings.warn("alignment is degenerate: L L_hat^T has rank < 3", RuntimeWarning)
    if proper and np.linalg.det(U @ Vt) < 0:
        U = U.copy()
        U[:, 2] *= -1
    Q = U @ Vt
    aligned = Q @ L_hat
    err = angular_error(aligned, L)
    return AlignmentResult(Q, float(err.max()), float(err.mean()), float(np.linalg.norm(aligned - L)), err)


def surface_rmse(u_hat: HeightField, u: HeightField, normalize: bool = False) -> float:
    """Root-mean-square height difference, optionally divided by ``max|u|``."""
    if u_hat.grid != u.grid:
        raise InvalidArgumentError("height fields live on different grids")
    err = float(np.sqrt(np.mean((u_hat.values - u.values) ** 2)))
    if normalize:
        scale = np.max(np.abs(u.values))
        if scale == 0:
            raise InvalidArgumentError("cannot normalize against a flat reference surface")
        err /= scale
    return err


def spectrum_report(M) -> dict:
    """Singular values of ``M`` and the rank-3 diagnostics ratios."""
    M = M.values if isinstance(M, ImageStack) else np.asarray(M, dtype=float)
    sigma = np.linalg.svd(M, compute_uv=False)
    top = sigma[0] if sigma[0] > 0 else 1.0
    ratio = lambda k: float(sigma[k] / top) if len(sigma) > k else 0.0  # noqa: E731
    return {
        "singular_values": sigma,
        "sigma2_over_sigma1": ratio(1),
        "sigma3_over_sigma1": ratio(2),
        "sigma4_over_sigma1": ratio(3),
    }
