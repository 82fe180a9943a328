"""Lambertian forward model: height field -> normals -> image stack."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .grid import Grid, centered_difference
from .scene import AlbedoMap, HeightField, LightSet


@dataclass
class SurfaceField:
    """Unit normals (``3 x p``) and per-pixel albedo (length ``p``)."""

    normals: np.ndarray
    albedo: np.ndarray = None
    zero_albedo: np.ndarray = None

    def __post_init__(self):
        self.normals = np.asarray(self.normals, dtype=float)
        if self.normals.ndim != 2 or self.normals.shape[0] != 3:
            raise InvalidArgumentError(f"normals must be 3 x p, got {self.normals.shape}")
        if self.albedo is None:
            self.albedo = np.ones(self.p)
        elif isinstance(self.albedo, AlbedoMap):
            self.albedo = self.albedo.values
        self.albedo = np.asarray(self.albedo, dtype=float).ravel()
        if self.albedo.shape != (self.p,):
            raise InvalidArgumentError("albedo length does not match the number of normals")

    @property
    def p(self) -> int:
        return self.normals.shape[1]

    def scaled_normals(self) -> np.ndarray:
        """``N D``: normals scaled by albedo, ``3 x p``."""
        return self.normals * self.albedo


@dataclass
class ImageStack:
    """Observation matrix ``M`` (``p x q``), one column per light."""

    grid: Grid
    values: np.ndarray
    light_ids: list = None
    shadow_fraction: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.grid.p:
            raise InvalidArgumentError(
                f"stack must be p x q with p={self.grid.p}, got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise InvalidArgumentError("image stack contains non-finite values")
        if self.light_ids is None:
            self.light_ids = list(range(self.q))

    @property
    def q(self) -> int:
        return self.values.shape[1]

    def image(self, t: int) -> np.ndarray:
        """Column ``t`` reshaped to the ``(r, s)`` grid."""
        return self.grid.unvectorize(self.values[:, t])


def normals_from_height(u: HeightField) -> SurfaceField:
    """Unit normals ``(-u_x, -u_y, 1) / sqrt(1 + |grad u|^2)`` by centered differences."""
    h = u.grid.h
    ux = centered_difference(u.values, h, axis=0)
    uy = centered_difference(u.values, h, axis=1)
    n = np.stack([-ux, -uy, np.ones_like(ux)])
    n /= np.sqrt(1 + ux**2 + uy**2)
    return SurfaceField(n.reshape(3, -1))


def render(surface: SurfaceField, lights, grid: Grid, clamp: bool = False) -> ImageStack:
    """Images ``m_kt = rho_k <n_k, l_t>``; negative values zeroed if ``clamp``."""
    L = lights.directions if isinstance(lights, LightSet) else np.asarray(lights, dtype=float)
    if L.shape[0] != 3:
        raise InvalidArgumentError("lights must be a 3 x q matrix")
    if surface.p != grid.p:
        raise InvalidArgumentError("surface and grid sizes disagree")
    M = surface.albedo[:, None] * (surface.normals.T @ L)
    negative = M < 0
    if clamp:
        M = np.where(negative, 0.0, M)
    return ImageStack(grid, M, shadow_fraction=float(negative.mean()), meta={"clamped": clamp})


def add_noise(stack: ImageStack, level: float, seed: int = 0, mode: str = "rms") -> ImageStack:
    """Add i.i.d. Gaussian noise.

    With ``mode="rms"`` the standard deviation is ``level * ||M||_F / sqrt(pq)``;
    with ``mode="entry"`` each entry gets ``level * |m_kt|``.
    """
    if not (np.isfinite(level) and level >= 0):
        raise InvalidArgumentError(f"noise level must be non-negative, got {level}")
    meta = dict(stack.meta, noise_level=level, noise_seed=seed, noise_mode=mode)
    if level == 0:
        return ImageStack(stack.grid, stack.values.copy(), list(stack.light_ids), stack.shadow_fraction, meta)
    M = stack.values
    E = np.random.default_rng(seed).standard_normal(M.shape)
    if mode == "rms":
        E *= level * np.linalg.norm(M) / np.sqrt(M.size)
    elif mode == "entry":
        E *= level * np.abs(M)
    else:
        raise InvalidArgumentError(f"unknown noise mode {mode!r}")
    return ImageStack(stack.grid, M + E, list(stack.light_ids), stack.shadow_fraction, meta)
