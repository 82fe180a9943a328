"""Run configuration: flat ``section.key = value`` text files."""

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .grid import Grid, make_grid
from .scene import LightSet, make_albedo, make_light_ring, make_surface, random_lights, tilt_light

FORMAT_VERSION = 1
BUNDLED = ("paper-noiseless", "paper-noise10", "degenerate-ring", "known-lights")


def parse_kv(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise InvalidArgumentError(f"line {lineno}: expected 'key = value', got {line!r}")
        out[key.strip()] = value.strip()
    return out


def _floats(text: str) -> list:
    return [float(v) for v in text.replace(",", " ").split()]


@dataclass
class RunConfig:
    r: int
    s: int
    A: float
    surface: dict
    albedo: dict = field(default_factory=lambda: {"kind": "constant", "c": "1"})
    lights: dict = field(default_factory=dict)
    noise_level: float = 0.0
    noise_seed: int = 0
    noise_mode: str = "rms"
    mode: str = "unknown"
    method: str = "fast-sine-transform"
    cg_tol: float = 1e-10
    output_dir: str = "out"
    gates: dict = field(default_factory=dict)
    name: str = "custom"
    raw: dict = field(default_factory=dict)

    def grid(self) -> Grid:
        return make_grid(self.r, self.s, self.A)

    def make_surface(self, grid: Grid):
        params = dict(self.surface)
        kind = params.pop("kind")
        kw = {}
        if "center" in params:
            kw["center"] = tuple(_floats(params.pop("center")))
        if "peaks" in params:
            kw["peaks"] = [tuple(_floats(chunk)) for chunk in params.pop("peaks").split(";") if chunk.strip()]
        if "taper" in params:
            kw["taper"] = params.pop("taper").lower() in ("1", "true", "yes", "on")
        for key, value in params.items():
            kw[key] = float(value)
        return make_surface(grid, kind, **kw)

    def make_albedo(self, grid: Grid):
        return make_albedo(grid, self.albedo.get("kind", "constant"), float(self.albedo.get("c", 1.0)))

    def make_lights(self) -> LightSet:
        opts = self.lights
        kind = opts.get("kind", "ring")
        if kind == "file":
            from .io import read_lights

            lights = read_lights(opts["file"])
        elif kind == "ring":
            q = int(opts.get("q", 7))
            perturb = None
            if "perturb" in opts:
                perturb = np.zeros((q, 3))
                for chunk in opts["perturb"].split(";"):
                    if chunk.strip():
                        t, offs = chunk.split(":")
                        perturb[int(t)] = _floats(offs)
            lights = make_light_ring(q, float(opts.get("delta", 1.0)), perturb)
        elif kind == "random":
            rng = np.random.default_rng(int(opts.get("seed", 0)))
            lights = random_lights(int(opts.get("q", 7)), rng, float(opts.get("min_elevation", 30)))
        else:
            raise InvalidArgumentError(f"unknown light kind {kind!r}")
        for chunk in opts.get("tilt", "").split(";"):
            if chunk.strip():
                t, deg = chunk.split(":")
                lights = tilt_light(lights, int(t), float(deg))
        return lights

    def echo(self) -> str:
        lines = [f"# config {self.name}, format version {FORMAT_VERSION}"]
        lines += [f"{k} = {v}" for k, v in self.raw.items()]
        return "\n".join(lines) + "\n"


def config_from_dict(raw: dict, name: str = "custom", base_dir: Path = None) -> RunConfig:
    def section(prefix):
        return {k[len(prefix) + 1:]: v for k, v in raw.items() if k.startswith(prefix + ".")}

    try:
        surface = section("surface")
        if "kind" not in surface:
            raise InvalidArgumentError("config is missing surface.kind")
        lights = section("lights")
        if lights.get("kind") == "file":
            path = Path(lights.get("file", ""))
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            if not path.is_file():
                raise InvalidArgumentError(f"light file {str(path)!r} does not exist")
            lights["file"] = str(path)
        cfg = RunConfig(
            r=int(raw["grid.r"]),
            s=int(raw["grid.s"]),
            A=float(raw["grid.A"]),
            surface=surface,
            albedo=section("albedo") or {"kind": "constant", "c": "1"},
            lights=lights,
            noise_level=float(raw.get("noise.level", 0.0)),
            noise_seed=int(raw.get("noise.seed", 0)),
            noise_mode=raw.get("noise.mode", "rms"),
            mode=raw.get("solve.mode", "unknown"),
            method=raw.get("poisson.method", "fast-sine-transform"),
            cg_tol=float(raw.get("poisson.tol", 1e-10)),
            output_dir=raw.get("output.dir", f"out/{name}"),
            gates={k: float(v) for k, v in section("gate").items()},
            name=name,
            raw=dict(raw),
        )
    except KeyError as exc:
        raise InvalidArgumentError(f"config is missing required key {exc.args[0]}") from None
    except ValueError as exc:
        if isinstance(exc, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"bad config value: {exc}") from None
    if cfg.mode not in ("known", "unknown"):
        raise InvalidArgumentError(f"solve.mode must be 'known' or 'unknown', got {cfg.mode!r}")
    if cfg.noise_level < 0:
        raise InvalidArgumentError("noise.level must be non-negative")
    cfg.grid()
    return cfg


def load_config(source) -> RunConfig:
    """Load a config from a path or the name of a bundled config."""
    if str(source) in BUNDLED:
        text = resources.files("photostereo.configs").joinpath(f"{source}.cfg").read_text()
        return config_from_dict(parse_kv(text), str(source))
    path = Path(source)
    if not path.is_file():
        raise InvalidArgumentError(f"no config file {str(path)!r} (bundled: {', '.join(BUNDLED)})")
    return config_from_dict(parse_kv(path.read_text()), path.stem, path.parent)
