"""Inverse solvers: known lights (pseudoinverse) and unknown lights (rank-3 SVD + Gram matrix)."""

from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .errors import (
    DegenerateDataError,
    DegenerateLightingError,
    DegenerateLightsError,
    InconsistentDataError,
    InvalidArgumentError,
    TooFewImagesError,
)
from .render import ImageStack, SurfaceField
from .scene import LightSet

MIN_IMAGES_UNKNOWN = 6
LIGHT_RANK_TOL = 1e-10
DATA_RANK_TOL = 1e-10
H_COND_TOL = 1e-8
SPD_FLOOR = 1e-8
INDEFINITE_TOL = 0.1


def _matrix(M) -> np.ndarray:
    return M.values if isinstance(M, ImageStack) else np.asarray(M, dtype=float)


def _lights(L) -> np.ndarray:
    return L.directions if isinstance(L, LightSet) else np.asarray(L, dtype=float)


def normalize_columns(Nt: np.ndarray):
    """Split scaled normals ``3 x p`` into unit normals and albedo.

    Zero columns get albedo 0, normal ``(0, 0, 1)`` and a ``True`` flag.
    """
    rho = np.linalg.norm(Nt, axis=0)
    zero = rho == 0
    N = np.empty_like(Nt)
    N[:, ~zero] = Nt[:, ~zero] / rho[~zero]
    N[:, zero] = np.array([[0.0], [0.0], [1.0]])
    return N, rho, zero


def solve_known(M, L) -> SurfaceField:
    """Recover normals and albedo from ``N~^T = M L^+`` when the lights are known."""
    M = _matrix(M)
    L = _lights(L)
    if L.shape[0] != 3 or M.shape[1] != L.shape[1]:
        raise InvalidArgumentError(f"stack with {M.shape[1]} images vs lights of shape {L.shape}")
    if L.shape[1] < 3:
        raise DegenerateLightsError(f"known-lights recovery needs q >= 3, got {L.shape[1]}")
    sv = np.linalg.svd(L, compute_uv=False)
    if sv[2] <= LIGHT_RANK_TOL * sv[0]:
        raise DegenerateLightsError(
            f"light matrix has rank < 3 (sigma_3/sigma_1 = {sv[2] / sv[0]:.3e})"
        )
    Nt = (M @ np.linalg.pinv(L)).T
    N, rho, zero = normalize_columns(Nt)
    return SurfaceField(N, rho, zero_albedo=zero)


@dataclass
class Rank3Factors:
    """Truncated SVD ``M ~ W^T Z`` with ``W = diag(s1..s3) U3^T`` and ``Z = V3^T``."""

    W: np.ndarray
    Z: np.ndarray
    sigma: np.ndarray

    def approximation(self) -> np.ndarray:
        return self.W.T @ self.Z


def rank3_truncate(M) -> Rank3Factors:
    M = _matrix(M)
    if M.ndim != 2 or M.shape[1] < 3:
        raise DegenerateDataError(f"need at least 3 images, got {M.shape[1] if M.ndim == 2 else 0}")
    U, sigma, Vt = linalg.svd(M, full_matrices=False)
    if sigma[0] == 0 or sigma[2] <= DATA_RANK_TOL * sigma[0]:
        ratio = sigma[2] / sigma[0] if sigma[0] else 0.0
        raise DegenerateDataError(
            f"data do not span three dimensions (sigma_3/sigma_1 = {ratio:.3e})"
        )
    W = sigma[:3, None] * U[:, :3].T
    return Rank3Factors(W, Vt[:3].copy(), sigma)


def build_H(Z: np.ndarray) -> np.ndarray:
    """Rows ``[z1^2, z2^2, z3^2, 2 z1 z2, 2 z1 z3, 2 z2 z3]``, one per column of ``Z``.

    With ``g = (g11, g22, g33, g12, g13, g23)``, ``H @ g`` equals the
    quadratic forms ``z_t^T G z_t``.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[0] != 3:
        raise InvalidArgumentError(f"Z must have 3 rows, got shape {Z.shape}")
    z1, z2, z3 = Z
    return np.column_stack([z1 * z1, z2 * z2, z3 * z3, 2 * z1 * z2, 2 * z1 * z3, 2 * z2 * z3])


def gram_from_vector(g: np.ndarray) -> np.ndarray:
    g11, g22, g33, g12, g13, g23 = g
    return np.array([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]])


@dataclass
class GramSolution:
    g: np.ndarray
    G: np.ndarray
    R: np.ndarray
    rank_H: int
    sigma_H: np.ndarray
    spd_projected: bool = False
    eigenvalues: np.ndarray = field(default=None)

    @property
    def sigma_min_H(self) -> float:
        return float(self.sigma_H[-1])

    @property
    def cond_ratio_H(self) -> float:
        return float(self.sigma_H[-1] / self.sigma_H[0])


def solve_gram(H: np.ndarray) -> GramSolution:
    """Solve ``H g = 1`` in the least-squares sense and factor ``G = R^T R``."""
    H = np.asarray(H, dtype=float)
    q = H.shape[0]
    if q < MIN_IMAGES_UNKNOWN:
        raise TooFewImagesError(
            f"unknown-lighting recovery needs at least {MIN_IMAGES_UNKNOWN} images, got {q}: "
            "the Gram system H g = 1 has 6 unknowns"
        )
    sigma_H = np.linalg.svd(H, compute_uv=False)
    if sigma_H[0] == 0 or sigma_H[-1] <= H_COND_TOL * sigma_H[0]:
        ratio = sigma_H[-1] / sigma_H[0] if sigma_H[0] else 0.0
        raise DegenerateLightingError(
            f"Gram system is rank deficient (sigma_min/sigma_max = {ratio:.3e}). "
            "Lights placed on an exact circle at constant height make the third column "
            "of H a combination of the first two; move at least one light off the ring."
        )
    rank_H = int(np.sum(sigma_H > H_COND_TOL * sigma_H[0]))
    g = np.linalg.lstsq(H, np.ones(q), rcond=None)[0]
    G = gram_from_vector(g)
    evals, evecs = np.linalg.eigh(G)
    trace = np.trace(G)
    if trace <= 0 or evals[0] < -INDEFINITE_TOL * trace:
        raise InconsistentDataError(
            f"estimated Gram matrix is indefinite (eigenvalues {evals}); "
            "data are not consistent with unit-norm lights"
        )
    floor = SPD_FLOOR * trace / 3
    projected = bool(evals[0] < floor)
    if projected:
        evals = np.maximum(evals, floor)
        G = (evecs * evals) @ evecs.T
        G = (G + G.T) / 2
    R = np.linalg.cholesky(G).T
    return GramSolution(g, G, R, rank_H, sigma_H, projected, evals)


SIGN_CANDIDATES = [np.diag(s) for s in product((1.0, -1.0), repeat=3)]


def fix_orientation(N: np.ndarray, L: np.ndarray):
    """Pick the sign flip ``diag(+-1, +-1, +-1)`` that makes most normals face the camera.

    Returns ``(Q N, Q L, Q)``.  Ties keep the identity.  Rotations other
    than sign flips are left unresolved.
    """
    best, best_count = SIGN_CANDIDATES[0], -1
    for Q in SIGN_CANDIDATES:
        count = int(np.sum(Q[2, 2] * N[2] > 0))
        if count > best_count:
            best, best_count = Q, count
    return best @ N, best @ L, best


class UnknownLightingResult(NamedTuple):
    surface: SurfaceField
    lights: np.ndarray
    gram: GramSolution
    factors: Rank3Factors
    orientation: np.ndarray


def solve_unknown(M, intensities=None) -> UnknownLightingResult:
    """Recover normals, albedo and light directions without knowing the lights.

    Truncates ``M`` to rank 3, finds the Gram matrix making every light unit
    length, sets ``N~ = R^{-T} W`` and ``L = R Z``, then applies the sign
    convention of :func:`fix_orientation`.  The result is defined only up to
    an orthogonal transformation; align against ground truth with
    :func:`photostereo.metrics.procrustes_align`.

    ``intensities`` (length ``q``) divides each image by its light intensity
    first, so unequal sources can still be normalized to unit lights.
    """
    M = _matrix(M)
    if intensities is not None:
        intensities = np.asarray(intensities, dtype=float)
        if intensities.shape != (M.shape[1],) or np.any(intensities <= 0):
            raise InvalidArgumentError("intensities must be q positive values")
        M = M / intensities
    if M.shape[1] < MIN_IMAGES_UNKNOWN:
        raise TooFewImagesError(
            f"unknown-lighting recovery needs at least {MIN_IMAGES_UNKNOWN} images, got {M.shape[1]}"
        )
    factors = rank3_truncate(M)
    gram = solve_gram(build_H(factors.Z))
    Nt = linalg.solve_triangular(gram.R, factors.W, trans="T")
    L_hat = gram.R @ factors.Z
    N, rho, zero = normalize_columns(Nt)
    N, L_hat, Q = fix_orientation(N, L_hat)
    if intensities is not None:
        L_hat = L_hat * intensities
    return UnknownLightingResult(SurfaceField(N, rho, zero_albedo=zero), L_hat, gram, factors, Q)
