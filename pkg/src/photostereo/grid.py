"""Rectangular pixel lattice and the lexicographic pixel index."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class Grid:
    """Interior ``r x s`` lattice of a ``A x B`` domain centred at the origin.

    Node ``(i, j)`` sits at ``(x_i, y_j)`` with ``x_i = -A/2 + i*h`` and
    ``y_j = -B/2 + j*h``.  Indices ``0`` and ``r+1`` (``s+1``) are the
    boundary ring, where every field is implicitly zero.  Stored fields are
    ``(r, s)`` arrays with ``i`` along axis 0.
    """

    r: int
    s: int
    A: float

    @property
    def h(self) -> float:
        return self.A / (self.r + 1)

    @property
    def B(self) -> float:
        return (self.s + 1) * self.h

    @property
    def p(self) -> int:
        return self.r * self.s

    @property
    def shape(self) -> tuple:
        return (self.r, self.s)

    def x(self, boundary: bool = False) -> np.ndarray:
        """x coordinates of interior nodes (or all ``r+2`` nodes)."""
        # h*(i - (r+1)/2) keeps the lattice exactly symmetric about 0
        i = np.arange(0, self.r + 2) if boundary else np.arange(1, self.r + 1)
        return self.h * (i - (self.r + 1) / 2)

    def y(self, boundary: bool = False) -> np.ndarray:
        j = np.arange(0, self.s + 2) if boundary else np.arange(1, self.s + 1)
        return self.h * (j - (self.s + 1) / 2)

    def mesh(self, boundary: bool = False):
        """``(X, Y)`` coordinate arrays with ``i`` along axis 0."""
        return np.meshgrid(self.x(boundary), self.y(boundary), indexing="ij")

    def vectorize(self, field: np.ndarray) -> np.ndarray:
        """Flatten an ``(r, s)`` field to length ``p`` in lexicographic order."""
        field = np.asarray(field)
        if field.shape[:2] != self.shape:
            raise InvalidArgumentError(f"field shape {field.shape} does not match grid {self.shape}")
        return field.reshape((self.p,) + field.shape[2:])

    def unvectorize(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec)
        if vec.shape[0] != self.p:
            raise InvalidArgumentError(f"vector length {vec.shape[0]} does not match p={self.p}")
        return vec.reshape(self.shape + vec.shape[1:])


def make_grid(r: int, s: int, A: float) -> Grid:
    """Build a grid of ``r x s`` interior pixels with horizontal side ``A``."""
    if int(r) != r or int(s) != s:
        raise InvalidArgumentError("r and s must be integers")
    if r < 2 or s < 2:
        raise InvalidArgumentError(f"grid needs r >= 2 and s >= 2, got r={r}, s={s}")
    if not np.isfinite(A) or A <= 0:
        raise InvalidArgumentError(f"side length A must be positive, got {A}")
    return Grid(int(r), int(s), float(A))


def lex_index(grid: Grid, i: int, j: int) -> int:
    """1-based pixel index ``k = (i-1)*s + j``."""
    if not (1 <= i <= grid.r and 1 <= j <= grid.s):
        raise InvalidArgumentError(f"pixel ({i}, {j}) outside 1..{grid.r} x 1..{grid.s}")
    return (i - 1) * grid.s + j


def lex_inverse(grid: Grid, k: int):
    """Inverse of :func:`lex_index`; returns ``(i, j)``."""
    if not 1 <= k <= grid.p:
        raise InvalidArgumentError(f"index {k} outside 1..{grid.p}")
    i, j0 = divmod(k - 1, grid.s)
    return i + 1, j0 + 1


def centered_difference(field: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Centered first difference along ``axis`` with zero boundary extension."""
    padded = np.pad(np.asarray(field, dtype=float), [(1, 1) if a == axis else (0, 0) for a in range(2)])
    hi = [slice(None), slice(None)]
    lo = [slice(None), slice(None)]
    hi[axis] = slice(2, None)
    lo[axis] = slice(None, -2)
    return (padded[tuple(hi)] - padded[tuple(lo)]) / (2 * h)
