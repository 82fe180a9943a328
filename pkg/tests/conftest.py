import numpy as np
import pytest

import photostereo as ps


def demo_scene(r=100, A=2.02, tilt=20.0, delta=1.5, q=7):
    grid = ps.make_grid(r, r, A)
    u = ps.make_surface(grid, "multi-peak")
    surface = ps.normals_from_height(u)
    lights = ps.make_light_ring(q, delta)
    if tilt:
        lights = ps.tilt_light(lights, 0, tilt)
    return grid, u, surface, lights


@pytest.fixture(scope="session")
def scene():
    return demo_scene()


@pytest.fixture(scope="session")
def stack(scene):
    grid, _, surface, lights = scene
    return ps.render(surface, lights, grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20181015)


def random_orthogonal(rng):
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    return Q * np.sign(np.diag(R))
