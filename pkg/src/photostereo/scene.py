"""Ground-truth surfaces, albedo maps and light configurations."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .grid import Grid

# (cx, cy, width, height) in domain units; sized for the A ~ 2 demo domain
DEFAULT_PEAKS = (
    (-0.35, -0.20, 0.22, 0.40),
    (0.30, 0.25, 0.20, 0.30),
    (0.20, -0.35, 0.16, 0.20),
    (-0.15, 0.40, 0.18, 0.25),
)

TAPER_FRACTION = 0.1


@dataclass
class HeightField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise InvalidArgumentError(
                f"height values {self.values.shape} do not match grid {self.grid.shape}"
            )

    def padded(self) -> np.ndarray:
        """Values including the zero boundary ring, shape ``(r+2, s+2)``."""
        return np.pad(self.values, 1)


@dataclass
class LightSet:
    """Unit light directions stored as the columns of a ``3 x q`` matrix."""

    directions: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.directions, dtype=float)
        if L.ndim != 2 or L.shape[0] != 3 or L.shape[1] < 1:
            raise InvalidArgumentError(f"lights must be a 3 x q matrix, got shape {L.shape}")
        if not np.all(np.isfinite(L)):
            raise InvalidArgumentError("light directions must be finite")
        norms = np.linalg.norm(L, axis=0)
        if np.any(norms == 0):
            raise InvalidArgumentError("zero light direction")
        self.directions = L / norms

    @property
    def q(self) -> int:
        return self.directions.shape[1]

    def __len__(self):
        return self.q


@dataclass
class AlbedoMap:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise InvalidArgumentError("albedo must be finite and strictly positive")


def boundary_taper(grid: Grid, fraction: float = TAPER_FRACTION, boundary: bool = False) -> np.ndarray:
    """Cosine rolloff to exactly zero over the outer ``fraction`` of the domain."""
    X, Y = grid.mesh(boundary)

    def ramp(dist, width):
        t = np.clip(dist / width, 0.0, 1.0)
        return 0.5 * (1.0 - np.cos(np.pi * t))

    return ramp(grid.A / 2 - np.abs(X), fraction * grid.A) * ramp(
        grid.B / 2 - np.abs(Y), fraction * grid.B
    )


def _gaussian(X, Y, cx, cy, width, height):
    if not (np.isfinite(width) and width > 0):
        raise InvalidArgumentError(f"bump width must be positive, got {width}")
    if not (np.isfinite(height) and height >= 0):
        raise InvalidArgumentError(f"bump height must be non-negative, got {height}")
    return height * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * width**2))


def make_surface(grid: Grid, kind: str = "multi-peak", *, taper: bool = True, **params) -> HeightField:
    """Sample a closed-form test surface on the interior nodes of ``grid``.

    Parameters
    ----------
    kind : {"flat", "gaussian-bump", "sphere-cap", "multi-peak"}
        ``gaussian-bump`` takes ``center``, ``width``, ``height``;
        ``sphere-cap`` takes ``radius`` (footprint) and ``height``;
        ``multi-peak`` takes ``peaks``, a sequence of ``(cx, cy, width, height)``.
    taper : bool
        Multiply by :func:`boundary_taper` so the field vanishes on the
        boundary ring.
    """
    X, Y = grid.mesh()
    if kind == "flat":
        return HeightField(grid, np.zeros(grid.shape))
    if kind == "gaussian-bump":
        cx, cy = params.get("center", (0.0, 0.0))
        u = _gaussian(X, Y, cx, cy, params.get("width", 0.3), params.get("height", 0.5))
    elif kind == "multi-peak":
        peaks = params.get("peaks", DEFAULT_PEAKS)
        u = np.zeros(grid.shape)
        for cx, cy, width, height in peaks:
            u += _gaussian(X, Y, cx, cy, width, height)
    elif kind == "sphere-cap":
        radius = float(params.get("radius", 0.6))
        height = float(params.get("height", 0.3))
        if not (radius > 0 and 0 < height < radius):
            raise InvalidArgumentError("sphere-cap needs 0 < height < radius")
        if radius >= (1 - TAPER_FRACTION) * min(grid.A, grid.B) / 2:
            raise InvalidArgumentError(f"sphere-cap radius {radius} reaches the domain boundary")
        rho = (radius**2 + height**2) / (2 * height)
        d2 = X**2 + Y**2
        u = np.where(d2 < radius**2, np.sqrt(np.maximum(rho**2 - d2, 0.0)) + height - rho, 0.0)
    else:
        raise InvalidArgumentError(f"unknown surface kind {kind!r}")
    if taper:
        u = u * boundary_taper(grid)
    if not np.all(np.isfinite(u)):
        raise InvalidArgumentError("surface parameters produce non-finite heights")
    return HeightField(grid, u)


def make_light_ring(q: int, delta: float, perturb=None) -> LightSet:
    """``q`` lights at equal azimuths on a circle of height ``delta``.

    ``l_t = (cos t_k, sin t_k, delta) / sqrt(1 + delta^2)`` with
    ``t_k = 2 pi k / q``.  ``perturb`` is an optional ``(q, 3)`` array of
    offsets added before re-normalization.
    """
    if q < 1:
        raise InvalidArgumentError("need at least one light")
    if not delta > 0:
        raise InvalidArgumentError(f"ring height delta must be positive, got {delta}")
    theta = 2 * np.pi * np.arange(q) / q
    L = np.vstack([np.cos(theta), np.sin(theta), np.full(q, float(delta))])
    L /= np.sqrt(1 + delta**2)
    if perturb is not None:
        perturb = np.asarray(perturb, dtype=float)
        if perturb.shape != (q, 3):
            raise InvalidArgumentError(f"perturb must have shape ({q}, 3)")
        L = L + perturb.T
    return LightSet(L)


def tilt_light(lights: LightSet, index: int, degrees: float) -> LightSet:
    """Raise the elevation of one light by ``degrees``, keeping its azimuth."""
    L = lights.directions.copy()
    x, y, z = L[:, index]
    azimuth = np.arctan2(y, x)
    elevation = np.arctan2(z, np.hypot(x, y)) + np.deg2rad(degrees)
    L[:, index] = [
        np.cos(elevation) * np.cos(azimuth),
        np.cos(elevation) * np.sin(azimuth),
        np.sin(elevation),
    ]
    return LightSet(L)


def random_lights(q: int, rng: np.random.Generator, min_elevation_deg: float = 30.0) -> LightSet:
    """Unit lights drawn uniformly on the spherical cap above ``min_elevation_deg``."""
    zmin = np.sin(np.deg2rad(min_elevation_deg))
    z = rng.uniform(zmin, 1.0, q)
    phi = rng.uniform(0.0, 2 * np.pi, q)
    rxy = np.sqrt(1 - z**2)
    return LightSet(np.vstack([rxy * np.cos(phi), rxy * np.sin(phi), z]))


def make_albedo(grid: Grid, kind: str = "constant", c: float = 1.0) -> AlbedoMap:
    """Constant albedo ``c`` or a smooth pattern with values in ``[c/2, c]``."""
    if not (np.isfinite(c) and c > 0):
        raise InvalidArgumentError(f"albedo level must be positive, got {c}")
    if kind == "constant":
        return AlbedoMap(np.full(grid.p, float(c)))
    if kind == "patterned":
        X, Y = grid.mesh()
        pattern = 0.75 + 0.25 * np.cos(3 * np.pi * X / grid.A) * np.cos(2 * np.pi * Y / grid.B)
        return AlbedoMap(c * grid.vectorize(pattern))
    raise InvalidArgumentError(f"unknown albedo kind {kind!r}")
