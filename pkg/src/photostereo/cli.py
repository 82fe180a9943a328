"""Command-line entry point: ``photostereo {render,solve,integrate,pipeline,report}``."""

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import io
from .config import BUNDLED, FORMAT_VERSION, load_config
from .errors import InvalidArgumentError, PhotostereoError
from .factorize import solve_known, solve_unknown
from .grid import make_grid
from .integrate import integrate_normals
from .metrics import angular_error, procrustes_align, spectrum_report, surface_rmse
from .render import SurfaceField, add_noise, normals_from_height, render
from .scene import HeightField

EXIT_GATE_FAILED = 1
EXIT_IO = 5


@contextmanager
def stage(name):
    try:
        yield
    except PhotostereoError as exc:
        exc.stage = getattr(exc, "stage", name)
        raise


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(out: Path, cfg, stage_name: str, files: list) -> None:
    lines = [
        f"# stage {stage_name}",
        f"format_version = {FORMAT_VERSION}",
        "matrix_dump = little-endian float64 column-major, header PSMAT magic + r s q (int64)",
        f"files = {' '.join(files)}",
    ]
    text = "\n".join(lines) + "\n"
    if cfg is not None:
        text += cfg.echo()
    (out / f"manifest_{stage_name}.txt").write_text(text)


def do_render(cfg, out: Path):
    grid = cfg.grid()
    with stage("render"):
        u = cfg.make_surface(grid)
        albedo = cfg.make_albedo(grid)
        lights = cfg.make_lights()
        surface = normals_from_height(u)
        surface.albedo = albedo.values
        stack = render(surface, lights, grid)
        stack = add_noise(stack, cfg.noise_level, cfg.noise_seed, cfg.noise_mode)
    io.write_stack(out / "stack.bin", stack)
    io.export_pgm_stack(out / "images", stack)
    io.write_height_csv(out / "height_true.csv", u)
    io.write_lights(out / "lights_true.txt", lights)
    io.write_matrix(out / "normals_true.bin", surface.normals.T, grid.r, grid.s)
    np.savetxt(out / "albedo_true.csv", albedo.values, fmt="%.17e")
    io.write_report(out / "render_report.txt", {
        "q": stack.q,
        "negative_fraction": stack.shadow_fraction,
        "noise_level": cfg.noise_level,
        "noise_seed": cfg.noise_seed,
        "noise_mode": cfg.noise_mode,
    })
    files = ["stack.bin", "images/", "height_true.csv", "lights_true.txt", "normals_true.bin",
             "albedo_true.csv", "render_report.txt"]
    _manifest(out, cfg, "render", files)
    return u, lights, surface, stack


def do_solve(stack, mode: str, lights, out: Path, cfg=None):
    report = spectrum_report(stack)
    diag = {"mode": mode, "q": stack.q, "singular_values": report["singular_values"],
            "sigma4_over_sigma1": report["sigma4_over_sigma1"]}
    with stage("solve"):
        if mode == "known":
            if lights is None:
                raise InvalidArgumentError("known mode needs a light file")
            surface = solve_known(stack, lights)
            L_hat = lights.directions
        elif mode == "unknown":
            if lights is not None:
                raise InvalidArgumentError("unknown mode does not accept a light file")
            res = solve_unknown(stack)
            surface, L_hat = res.surface, res.lights
            diag.update({
                "sigma_H": res.gram.sigma_H,
                "sigma_min_over_max_H": res.gram.cond_ratio_H,
                "rank_H": res.gram.rank_H,
                "spd_projected": res.gram.spd_projected,
                "gram_eigenvalues": res.gram.eigenvalues,
                "light_norm_max_deviation": float(np.max(np.abs(np.linalg.norm(L_hat, axis=0) - 1))),
            })
        else:
            raise InvalidArgumentError(f"unknown solve mode {mode!r}")
    diag["zero_albedo_pixels"] = int(np.sum(surface.zero_albedo))
    g = stack.grid
    io.write_matrix(out / "normals.bin", surface.normals.T, g.r, g.s)
    np.savetxt(out / "albedo.csv", surface.albedo, fmt="%.17e")
    io.write_lights(out / "lights_est.txt", L_hat)
    io.write_report(out / "diagnostics.txt", diag)
    _manifest(out, cfg, "solve", ["normals.bin", "albedo.csv", "lights_est.txt", "diagnostics.txt"])
    return surface, L_hat, diag


def do_integrate(surface, grid, method, out: Path, cfg=None, tol=1e-10, name="height"):
    with stage("integrate"):
        u = integrate_normals(surface, grid, method, tol=tol)
    io.write_height_csv(out / f"{name}.csv", u)
    io.write_obj(out / f"{name}.obj", u)
    _manifest(out, cfg, "integrate", [f"{name}.csv", f"{name}.obj"])
    return u


def cmd_render(args):
    cfg = load_config(args.config)
    do_render(cfg, _outdir(args.out or cfg.output_dir))
    return 0


def cmd_solve(args):
    cfg = load_config(args.config) if args.config else None
    A = args.A if args.A is not None else (cfg.A if cfg else None)
    if A is None:
        raise InvalidArgumentError("grid side length needed: pass --A or --config")
    mode = args.mode or (cfg.mode if cfg else "unknown")
    if mode == "unknown" and args.lights:
        raise InvalidArgumentError("unknown mode does not accept --lights")
    lights = io.read_lights(args.lights) if args.lights else None
    stack = io.read_stack(args.stack, A)
    do_solve(stack, mode, lights, _outdir(args.out), cfg)
    return 0


def cmd_integrate(args):
    cfg = load_config(args.config) if args.config else None
    A = args.A if args.A is not None else (cfg.A if cfg else None)
    if A is None:
        raise InvalidArgumentError("grid side length needed: pass --A or --config")
    r, s, X = io.read_matrix(args.normals)
    if X.shape[1] != 3:
        raise InvalidArgumentError(f"{args.normals}: expected a p x 3 normal dump")
    method = args.method or (cfg.method if cfg else "fast-sine-transform")
    do_integrate(SurfaceField(X.T), make_grid(r, s, A), method, _outdir(args.out), cfg)
    return 0


def cmd_pipeline(args):
    cfg = load_config(args.config)
    out = _outdir(args.out or cfg.output_dir)
    u, lights, truth, stack = do_render(cfg, out)
    grid = stack.grid
    surface, L_hat, diag = do_solve(stack, cfg.mode, lights if cfg.mode == "known" else None, out, cfg)
    metrics = {"config": cfg.name, "mode": cfg.mode, "noise_level": cfg.noise_level,
               "sigma4_over_sigma1": diag["sigma4_over_sigma1"]}
    with stage("metrics"):
        if cfg.mode == "unknown":
            align = procrustes_align(L_hat, lights)
            metrics.update({"light_error_max": align.max_error, "light_error_mean": align.mean_error,
                            "alignment_residual": align.residual,
                            "alignment_det": float(np.linalg.det(align.Q))})
            aligned = SurfaceField(align.Q @ surface.normals, surface.albedo)
        else:
            aligned = surface
        nerr = angular_error(aligned.normals, truth.normals)
        metrics.update({"normal_error_max": float(nerr.max()), "normal_error_mean": float(nerr.mean())})
    u_hat = do_integrate(aligned, grid, cfg.method, out, cfg, cfg.cg_tol)
    metrics["surface_rmse"] = surface_rmse(u_hat, u)
    metrics["surface_rmse_normalized"] = surface_rmse(u_hat, u, normalize=True)

    checks = {"light_error": "light_error_max", "surface_rmse": "surface_rmse_normalized"}
    passed = True
    for gate, limit in cfg.gates.items():
        key = checks.get(gate)
        if key is None or key not in metrics:
            continue
        ok = metrics[key] <= limit
        metrics[f"gate_{gate}"] = f"{'pass' if ok else 'FAIL'} ({metrics[key]:.3e} <= {limit:.1e})"
        passed &= ok
    metrics["gates_passed"] = passed
    io.write_report(out / "metrics.txt", metrics)
    print(io.format_report(metrics), end="")
    return 0 if passed else EXIT_GATE_FAILED


def cmd_report(args):
    for path in args.files:
        print(f"# {path}")
        if Path(path).suffix == ".bin":
            r, s, X = io.read_matrix(path)
            rep = spectrum_report(X)
            rep = {"rows": X.shape[0], "columns": X.shape[1], **rep}
        else:
            rep = io.read_report(path)
        print(io.format_report(rep), end="")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="photostereo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    cfg_help = f"config file or bundled name ({', '.join(BUNDLED)})"

    p = sub.add_parser("render", help="render a synthetic image stack and ground truth")
    p.add_argument("config", help=cfg_help)
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("solve", help="recover normals, albedo and lights from a stack")
    p.add_argument("stack", help="raw matrix dump written by 'render'")
    p.add_argument("--config", help=cfg_help)
    p.add_argument("--mode", choices=("known", "unknown"))
    p.add_argument("--lights", help="light file (q rows x 3), known mode only")
    p.add_argument("--A", type=float, help="horizontal side length of the domain")
    p.add_argument("--out", default="solve_out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("integrate", help="integrate a normal field into a height field")
    p.add_argument("normals", help="p x 3 normal dump written by 'solve'")
    p.add_argument("--config", help=cfg_help)
    p.add_argument("--A", type=float)
    p.add_argument("--method", choices=("direct-banded", "conjugate-gradient", "fast-sine-transform"))
    p.add_argument("--out", default="integrate_out")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("pipeline", help="render, solve, integrate and score in one run")
    p.add_argument("config", help=cfg_help)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("report", help="print key-value reports or the spectrum of a stack dump")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PhotostereoError as exc:
        where = getattr(exc, "stage", None)
        prefix = f"{where}: " if where else ""
        print(f"photostereo: {prefix}{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"photostereo: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
