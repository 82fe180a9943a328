"""File formats: raw float64 matrix dumps, 16-bit PGM, CSV, OBJ, light lists, key-value reports."""

import struct
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .grid import Grid
from .render import ImageStack
from .scene import HeightField, LightSet

MAGIC = b"PSMAT\x00\x00\x01"
_HEADER = struct.Struct("<8s3q")


def write_matrix(path, X: np.ndarray, r: int, s: int) -> None:
    """Dump a ``p x q`` matrix over an ``r x s`` grid: header then column-major little-endian float64."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != r * s:
        raise InvalidArgumentError(f"matrix of shape {X.shape} does not fit an {r} x {s} grid")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, r, s, X.shape[1]))
        fh.write(np.asfortranarray(X).astype("<f8").tobytes(order="F"))


def read_matrix(path):
    """Inverse of :func:`write_matrix`; returns ``(r, s, X)``."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise InvalidArgumentError(f"{path}: truncated header")
    magic, r, s, q = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise InvalidArgumentError(f"{path}: not a matrix dump (bad magic)")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != r * s * q:
        raise InvalidArgumentError(f"{path}: expected {r * s * q} values, found {body.size}")
    return r, s, body.reshape((r * s, q), order="F").astype(float)


def write_stack(path, stack: ImageStack) -> None:
    write_matrix(path, stack.values, stack.grid.r, stack.grid.s)


def read_stack(path, A: float) -> ImageStack:
    from .grid import make_grid

    r, s, X = read_matrix(path)
    return ImageStack(make_grid(r, s, A), X)


def write_pgm(path, image: np.ndarray) -> None:
    """16-bit binary PGM; ``image`` holds integers in ``[0, 65535]`` with rows along ``y``."""
    img = np.asarray(image)
    height, width = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n65535\n".encode("ascii"))
        fh.write(img.astype(">u2").tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    pos += 1
    if fields[0] != b"P5" or int(fields[3]) != 65535:
        raise InvalidArgumentError(f"{path}: only 16-bit P5 PGM is supported")
    width, height = int(fields[1]), int(fields[2])
    return np.frombuffer(data, dtype=">u2", count=width * height, offset=pos).reshape(height, width).astype(np.uint16)


def export_pgm_stack(directory, stack: ImageStack, prefix: str = "img") -> list:
    """Write one PGM per image plus ``pgm_map.txt`` recording ``value = offset + scale * level``.

    Negative radiance is clamped to zero.  All images share one map so
    relative brightness is kept.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    M = np.maximum(stack.values, 0.0)
    top = M.max()
    scale = top / 65535 if top > 0 else 1.0
    paths = []
    for t in range(stack.q):
        levels = np.rint(stack.image(t) / scale).astype(np.int64)
        path = directory / f"{prefix}_{t + 1:02d}.pgm"
        # image rows run along y (index j), columns along x (index i)
        write_pgm(path, np.clip(levels, 0, 65535).T)
        paths.append(path)
    write_report(directory / "pgm_map.txt", {"offset": 0.0, "scale": scale, "count": stack.q, "clamped": True})
    return paths


def import_pgm_image(path, scale: float, offset: float = 0.0) -> np.ndarray:
    """PGM levels back to an ``(r, s)`` float image."""
    return offset + scale * read_pgm(path).T.astype(float)


def write_height_csv(path, u: HeightField) -> None:
    np.savetxt(path, u.values, fmt="%.17e", delimiter=",")


def read_height_csv(path, grid: Grid) -> HeightField:
    return HeightField(grid, np.loadtxt(path, delimiter=",", ndmin=2))


def write_obj(path, u: HeightField) -> None:
    """Triangle mesh over the full grid, boundary ring included, two triangles per cell."""
    g = u.grid
    X, Y = g.mesh(boundary=True)
    Z = u.padded()
    nx, ny = X.shape
    with open(path, "w") as fh:
        for xv, yv, zv in zip(X.ravel(), Y.ravel(), Z.ravel()):
            fh.write(f"v {xv:.10g} {yv:.10g} {zv:.10g}\n")
        idx = np.arange(nx * ny).reshape(nx, ny) + 1
        for i in range(nx - 1):
            for j in range(ny - 1):
                a, b, c, d = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
                fh.write(f"f {a} {b} {c}\nf {a} {c} {d}\n")


def write_lights(path, L) -> None:
    """One light per row, three whitespace-separated components."""
    L = L.directions if isinstance(L, LightSet) else np.asarray(L, dtype=float)
    np.savetxt(path, L.T, fmt="%.17e")


def read_lights(path) -> LightSet:
    """Read ``q`` rows of 3 components; rows are normalized to unit length."""
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 3:
        raise InvalidArgumentError(f"{path}: expected 3 columns, found {data.shape[1]}")
    return LightSet(data.T)


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(_format(v) for v in np.ravel(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_report(path, report: dict) -> None:
    Path(path).write_text(format_report(report))


def format_report(report: dict) -> str:
    return "".join(f"{k} = {_format(v)}\n" for k, v in report.items())


def read_report(path) -> dict:
    """Parse a key-value report; numeric values become floats (or float arrays)."""
    from .config import parse_kv

    out = {}
    for key, value in parse_kv(Path(path).read_text()).items():
        parts = value.split()
        try:
            nums = [float(v) for v in parts]
        except ValueError:
            out[key] = {"true": True, "false": False}.get(value, value)
            continue
        out[key] = nums[0] if len(nums) == 1 else np.array(nums)
    return out
