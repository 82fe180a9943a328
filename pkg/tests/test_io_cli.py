import numpy as np
import pytest

import photostereo as ps
from photostereo import io
from photostereo.cli import main
from photostereo.config import config_from_dict, load_config, parse_kv


def test_matrix_round_trip(tmp_path, rng):
    X = rng.standard_normal((12, 5))
    io.write_matrix(tmp_path / "m.bin", X, 4, 3)
    r, s, Y = io.read_matrix(tmp_path / "m.bin")
    assert (r, s) == (4, 3)
    np.testing.assert_array_equal(X, Y)
    raw = (tmp_path / "m.bin").read_bytes()
    assert raw[:8] == io.MAGIC and len(raw) == 8 + 24 + 60 * 8
    # column-major: second value on disk is X[1, 0]
    assert np.frombuffer(raw, "<f8", count=2, offset=32)[1] == X[1, 0]


def test_matrix_bad_magic(tmp_path):
    (tmp_path / "bad.bin").write_bytes(b"x" * 64)
    with pytest.raises(ps.InvalidArgumentError):
        io.read_matrix(tmp_path / "bad.bin")


def test_pgm_round_trip(tmp_path, stack):
    paths = io.export_pgm_stack(tmp_path, stack)
    assert len(paths) == 7
    assert paths[0].read_bytes().startswith(b"P5\n100 100\n65535\n")
    m = io.read_report(tmp_path / "pgm_map.txt")
    back = io.import_pgm_image(paths[3], m["scale"], m["offset"])
    np.testing.assert_allclose(back, stack.image(3), atol=m["scale"] / 2 + 1e-15)


def test_height_csv_and_obj(tmp_path):
    g = ps.make_grid(6, 4, 1.0)
    u = ps.make_surface(g, "gaussian-bump", width=0.2, height=0.3)
    io.write_height_csv(tmp_path / "u.csv", u)
    np.testing.assert_array_equal(io.read_height_csv(tmp_path / "u.csv", g).values, u.values)
    io.write_obj(tmp_path / "u.obj", u)
    lines = (tmp_path / "u.obj").read_text().splitlines()
    assert sum(line.startswith("v ") for line in lines) == 8 * 6
    assert sum(line.startswith("f ") for line in lines) == 2 * 7 * 5


def test_lights_file_normalized(tmp_path):
    (tmp_path / "l.txt").write_text("0 0 2\n3 0 4\n0 1 1\n")
    L = io.read_lights(tmp_path / "l.txt").directions
    np.testing.assert_allclose(L[:, 1], [0.6, 0, 0.8])
    np.testing.assert_allclose(np.linalg.norm(L, axis=0), 1.0)


def test_report_round_trip(tmp_path):
    rep = {"a": 1.5, "flag": True, "sv": np.array([3.0, 2.0, 1.0]), "name": "x"}
    io.write_report(tmp_path / "r.txt", rep)
    back = io.read_report(tmp_path / "r.txt")
    assert back["a"] == 1.5 and back["flag"] is True and back["name"] == "x"
    np.testing.assert_array_equal(back["sv"], rep["sv"])


def test_bundled_configs():
    cfg = load_config("paper-noiseless")
    assert (cfg.r, cfg.s) == (100, 100) and cfg.grid().h == pytest.approx(1 / 50)
    L = cfg.make_lights()
    assert L.q == 7
    assert load_config("paper-noise10").noise_level == 0.1


def test_config_validation():
    base = parse_kv("grid.r = 10\ngrid.s = 10\ngrid.A = 1\nsurface.kind = flat\n")
    config_from_dict(base)
    missing = {k: v for k, v in base.items() if not k.startswith("surface")}
    with pytest.raises(ps.InvalidArgumentError, match="surface"):
        config_from_dict(missing)
    with pytest.raises(ps.InvalidArgumentError):
        config_from_dict(dict(base, **{"lights.kind": "file", "lights.file": "/nonexistent"}))
    with pytest.raises(ps.InvalidArgumentError):
        config_from_dict(dict(base, **{"solve.mode": "maybe"}))
    with pytest.raises(ps.InvalidArgumentError):
        parse_kv("no equals sign")


def test_config_light_options():
    cfg = config_from_dict(parse_kv(
        "grid.r = 10\ngrid.s = 10\ngrid.A = 1\nsurface.kind = multi-peak\n"
        "surface.peaks = 0 0 0.2 0.3; 0.1 0.1 0.1 0.1\n"
        "lights.kind = ring\nlights.q = 6\nlights.delta = 1\nlights.perturb = 2: 0, 0, 0.5\n"
    ))
    L = cfg.make_lights().directions
    expected = ps.make_light_ring(6, 1.0).directions
    assert not np.allclose(L[:, 2], expected[:, 2])
    np.testing.assert_allclose(L[:, 0], expected[:, 0])


def write_cfg(path, **over):
    keys = parse_kv((load_config("paper-noiseless").echo()))
    keys.update({"grid.r": "40", "grid.s": "40", "grid.A": "2.02"})
    keys.update(over)
    path.write_text("".join(f"{k} = {v}\n" for k, v in keys.items()))
    return str(path)


def test_cli_render(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg")
    assert main(["render", cfg, "--out", str(tmp_path / "r")]) == 0
    out = tmp_path / "r"
    assert len(list((out / "images").glob("*.pgm"))) == 7
    for name in ("stack.bin", "height_true.csv", "lights_true.txt", "manifest_render.txt"):
        assert (out / name).is_file()
    assert "grid.r = 40" in (out / "manifest_render.txt").read_text()


def test_cli_render_single_light(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", **{"lights.q": "1", "lights.tilt": ""})
    assert main(["render", cfg, "--out", str(tmp_path / "r")]) == 0
    assert len(list((tmp_path / "r" / "images").glob("*.pgm"))) == 1


def test_cli_render_missing_surface(tmp_path, capsys):
    path = tmp_path / "c.cfg"
    path.write_text("grid.r = 10\ngrid.s = 10\ngrid.A = 1\n")
    assert main(["render", str(path)]) == 2
    assert "surface" in capsys.readouterr().err


def test_cli_missing_config():
    assert main(["render", "/no/such/config.cfg"]) == 2


def test_cli_solve_known(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg")
    main(["render", cfg, "--out", str(tmp_path / "r")])
    r = tmp_path / "r"
    rc = main(["solve", str(r / "stack.bin"), "--mode", "known", "--lights", str(r / "lights_true.txt"),
               "--A", "2.02", "--out", str(tmp_path / "s")])
    assert rc == 0
    _, _, N = io.read_matrix(tmp_path / "s" / "normals.bin")
    _, _, N_true = io.read_matrix(r / "normals_true.bin")
    assert ps.angular_error(N.T, N_true.T).max() <= 1e-10
    rc = main(["integrate", str(tmp_path / "s" / "normals.bin"), "--A", "2.02", "--out", str(tmp_path / "i")])
    assert rc == 0 and (tmp_path / "i" / "height.obj").is_file()


def test_cli_solve_mode_arguments(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg")
    main(["render", cfg, "--out", str(tmp_path / "r")])
    stack = str(tmp_path / "r" / "stack.bin")
    lights = str(tmp_path / "r" / "lights_true.txt")
    assert main(["solve", stack, "--mode", "known", "--A", "2.02", "--out", str(tmp_path / "s")]) == 2
    assert main(["solve", stack, "--mode", "unknown", "--lights", lights, "--A", "2.02"]) == 2


def test_cli_unknown_too_few_images(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.cfg", **{"lights.q": "5", "lights.tilt": "0:20"})
    main(["render", cfg, "--out", str(tmp_path / "r")])
    rc = main(["solve", str(tmp_path / "r" / "stack.bin"), "--mode", "unknown", "--A", "2.02",
               "--out", str(tmp_path / "s")])
    assert rc == 3
    err = capsys.readouterr().err
    assert "TooFewImagesError" in err and "at least 6 images" in err


def test_cli_unknown_ring(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.cfg", **{"lights.tilt": ""})
    main(["render", cfg, "--out", str(tmp_path / "r")])
    rc = main(["solve", str(tmp_path / "r" / "stack.bin"), "--config", cfg, "--out", str(tmp_path / "s")])
    assert rc == 3
    assert "circle" in capsys.readouterr().err


@pytest.mark.parametrize("name, code", [("paper-noiseless", 0), ("paper-noise10", 0),
                                        ("degenerate-ring", 3), ("known-lights", 0)])
def test_cli_pipeline_bundled(tmp_path, name, code, capsys):
    assert main(["pipeline", name, "--out", str(tmp_path)]) == code
    if code == 0:
        metrics = io.read_report(tmp_path / "metrics.txt")
        assert metrics["gates_passed"] is True
    else:
        assert "solve: DegenerateLightingError" in capsys.readouterr().err


def test_cli_pipeline_gate_failure(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", **{"gate.surface_rmse": "1e-9"})
    assert main(["pipeline", cfg, "--out", str(tmp_path / "o")]) == 1


def test_cli_deterministic(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", **{"noise.level": "0.1", "noise.seed": "7"})
    main(["pipeline", cfg, "--out", str(tmp_path / "a")])
    main(["pipeline", cfg, "--out", str(tmp_path / "b")])
    for name in ("stack.bin", "normals.bin", "height.csv", "lights_est.txt", "metrics.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_report(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.cfg")
    main(["pipeline", cfg, "--out", str(tmp_path / "o")])
    capsys.readouterr()
    assert main(["report", str(tmp_path / "o" / "stack.bin"), str(tmp_path / "o" / "diagnostics.txt")]) == 0
    out = capsys.readouterr().out
    assert "sigma4_over_sigma1" in out and "sigma_H" in out


def test_cli_io_error(tmp_path):
    assert main(["report", str(tmp_path / "missing.txt")]) == 5
