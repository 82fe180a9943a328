"""Normal field -> height field via a 5-point Poisson solve with zero Dirichlet data."""

from dataclasses import dataclass

import numpy as np
from scipy import fft, sparse
from scipy.linalg import solveh_banded
from scipy.sparse.linalg import cg

from .errors import ConvergenceError, GrazingNormalError, InvalidArgumentError
from .grid import Grid, centered_difference
from .render import SurfaceField
from .scene import HeightField

N3_MIN = 1e-6
METHODS = ("direct-banded", "conjugate-gradient", "fast-sine-transform")


@dataclass
class GradientField:
    px: np.ndarray
    py: np.ndarray


@dataclass
class LaplacianField:
    f: np.ndarray


def gradient_from_normals(surface: SurfaceField, grid: Grid) -> GradientField:
    """``u_x = -n1/n3``, ``u_y = -n2/n3`` on the interior grid."""
    N = surface.normals
    if N.shape[1] != grid.p:
        raise InvalidArgumentError("normal field and grid sizes disagree")
    bad = np.flatnonzero(~(N[2] >= N3_MIN))
    if bad.size:
        raise GrazingNormalError(
            f"{bad.size} normals have n3 < {N3_MIN} (first pixel index {bad[0] + 1})",
            pixels=bad + 1,
        )
    px = grid.unvectorize(-N[0] / N[2])
    py = grid.unvectorize(-N[1] / N[2])
    return GradientField(px, py)


def divergence(gf: GradientField, grid: Grid) -> LaplacianField:
    """``f = D_x px + D_y py`` with centered differences and zero extension."""
    h = grid.h
    return LaplacianField(centered_difference(gf.px, h, 0) + centered_difference(gf.py, h, 1))


def poisson_matrix(r: int, s: int) -> sparse.csr_matrix:
    """The ``rs x rs`` 5-point matrix: blocks ``T`` on the diagonal, ``I_s`` beside it."""
    T = sparse.diags([1.0, -4.0, 1.0], [-1, 0, 1], shape=(s, s))
    E = sparse.diags([1.0, 1.0], [-1, 1], shape=(r, r))
    return (sparse.kron(sparse.identity(r), T) + sparse.kron(E, sparse.identity(s))).tocsr()


def _neg_banded(r: int, s: int) -> np.ndarray:
    # upper-banded storage of -A for solveh_banded; bandwidth s
    ab = np.zeros((s + 1, r * s))
    ab[s] = 4.0
    sub = np.ones(r * s - 1)
    sub[np.arange(1, r * s) % s == 0] = 0.0  # no coupling across block boundaries
    ab[s - 1, 1:] = -sub
    ab[0, s:] = -1.0
    return ab


def _solve_dst(rhs: np.ndarray) -> np.ndarray:
    r, s = rhs.shape
    lam_x = 2 * np.cos(np.pi * np.arange(1, r + 1) / (r + 1)) - 2
    lam_y = 2 * np.cos(np.pi * np.arange(1, s + 1) / (s + 1)) - 2
    coef = fft.dstn(rhs, type=1, norm="ortho")
    coef /= lam_x[:, None] + lam_y[None, :]
    return fft.idstn(coef, type=1, norm="ortho")


def poisson_solve(
    f, grid: Grid, method: str = "fast-sine-transform", tol: float = 1e-10, maxiter: int = None
) -> HeightField:
    """Solve ``u[i-1,j] + u[i,j-1] - 4u[i,j] + u[i,j+1] + u[i+1,j] = h^2 f[i,j]``.

    Zero boundary values are implied.  ``tol`` is the relative residual for
    ``conjugate-gradient``; the other two methods are direct.
    """
    f = f.f if isinstance(f, LaplacianField) else np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise InvalidArgumentError(f"right-hand side {f.shape} does not match grid {grid.shape}")
    if not np.all(np.isfinite(f)):
        raise InvalidArgumentError("right-hand side is not finite")
    r, s = grid.shape
    rhs = grid.h**2 * f
    if method == "fast-sine-transform":
        u = _solve_dst(rhs)
    elif method == "direct-banded":
        u = solveh_banded(_neg_banded(r, s), -rhs.ravel(), check_finite=False).reshape(r, s)
    elif method == "conjugate-gradient":
        # CG on -A, which is symmetric positive definite
        b = -rhs.ravel()
        if not np.any(b):
            return HeightField(grid, np.zeros(grid.shape))
        maxiter = maxiter or 10 * r * s
        x, info = cg(-poisson_matrix(r, s), b, rtol=tol, atol=0.0, maxiter=maxiter)
        if info != 0:
            raise ConvergenceError(f"conjugate gradient did not reach rtol={tol} in {maxiter} iterations")
        u = x.reshape(r, s)
    else:
        raise InvalidArgumentError(f"unknown Poisson method {method!r}; choose from {METHODS}")
    return HeightField(grid, u)


def integrate_normals(surface: SurfaceField, grid: Grid, method: str = "fast-sine-transform", **kw) -> HeightField:
    """Normals -> gradient -> divergence -> Poisson solve."""
    return poisson_solve(divergence(gradient_from_normals(surface, grid), grid), grid, method, **kw)
