import numpy as np
import pytest

import photostereo as ps
from conftest import demo_scene, random_orthogonal
from photostereo import (
    DegenerateDataError,
    DegenerateLightingError,
    DegenerateLightsError,
    TooFewImagesError,
)
from photostereo.factorize import gram_from_vector


def test_known_identity_lights():
    M = np.array([[0.0, 0.0, 2.0]])
    sf = ps.solve_known(M, np.eye(3))
    assert sf.albedo[0] == 2.0
    np.testing.assert_array_equal(sf.normals[:, 0], [0, 0, 1])


def test_known_round_trip(scene, stack):
    _, _, surface, lights = scene
    sf = ps.solve_known(stack, lights)
    assert ps.angular_error(sf.normals, surface.normals).max() <= 1e-10
    np.testing.assert_allclose(sf.albedo, 1.0, rtol=1e-10)


def test_known_coplanar_lights():
    L = np.array([[1.0, 0, -1, 0], [0, 1, 0, -1], [0, 0, 0, 0]])
    with pytest.raises(DegenerateLightsError):
        ps.solve_known(np.ones((4, 4)), L)


def test_known_zero_pixel():
    M = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]])
    sf = ps.solve_known(M, np.eye(3))
    assert sf.zero_albedo.tolist() == [True, False]
    np.testing.assert_array_equal(sf.normals[:, 0], [0, 0, 1])


def test_rank3_truncate_noiseless(stack):
    f = ps.rank3_truncate(stack)
    assert f.sigma[3] / f.sigma[0] <= 1e-10
    M = stack.values
    assert np.linalg.norm(f.approximation() - M) / np.linalg.norm(M) <= 1e-9
    np.testing.assert_allclose(f.Z @ f.Z.T, np.eye(3), atol=1e-14)


def test_rank3_truncate_flat_is_degenerate(scene):
    grid, _, _, lights = scene
    flat = ps.normals_from_height(ps.make_surface(grid, "flat"))
    with pytest.raises(DegenerateDataError):
        ps.rank3_truncate(ps.render(flat, lights, grid))


def test_rank3_truncate_noisy(stack):
    noisy = ps.add_noise(stack, 0.1, 0).values
    f = ps.rank3_truncate(noisy)
    assert np.linalg.norm(f.approximation()) ** 2 >= 0.99 * np.linalg.norm(noisy) ** 2
    # best rank-3 error is the energy of the discarded singular values
    tail = np.sqrt(np.sum(f.sigma[3:] ** 2))
    assert np.linalg.norm(f.approximation() - noisy) == pytest.approx(tail, rel=1e-10)


def test_rank3_truncate_residual_bound(stack):
    f = ps.rank3_truncate(stack)
    M = stack.values
    bound = np.linalg.norm(M) * (f.sigma[3] / f.sigma[0] + 10 * np.finfo(float).eps)
    assert np.linalg.norm(f.approximation() - M) <= bound


def test_build_H_unit_row():
    np.testing.assert_array_equal(ps.build_H(np.array([[1.0], [0], [0]])), [[1, 0, 0, 0, 0, 0]])


def test_build_H_quadratic_form(rng):
    for _ in range(100):
        z = rng.standard_normal(3)
        S = rng.standard_normal((3, 3))
        G = S + S.T
        g = np.array([G[0, 0], G[1, 1], G[2, 2], G[0, 1], G[0, 2], G[1, 2]])
        np.testing.assert_array_equal(gram_from_vector(g), G)
        direct = sum(z[a] * z[b] * G[a, b] for a in range(3) for b in range(3))
        assert ps.build_H(z[:, None])[0] @ g == pytest.approx(direct, rel=1e-13, abs=1e-13)


def test_ring_H_rank(scene):
    grid, _, surface, _ = scene
    M = ps.render(surface, ps.make_light_ring(7, 1.5), grid)
    sv = np.linalg.svd(ps.build_H(ps.rank3_truncate(M).Z), compute_uv=False)
    assert sv[-1] / sv[0] <= 1e-10


@pytest.mark.parametrize("q", range(1, 6))
def test_solve_gram_rejects_few_images(q, rng):
    Z = rng.standard_normal((3, q))
    with pytest.raises(TooFewImagesError, match="6"):
        ps.solve_gram(ps.build_H(Z))


def test_solve_gram_exact_ring(scene):
    grid, _, surface, _ = scene
    M = ps.render(surface, ps.make_light_ring(7, 1.5), grid)
    with pytest.raises(DegenerateLightingError, match="circle"):
        ps.solve_unknown(M)


def test_solve_gram_noiseless(stack):
    f = ps.rank3_truncate(stack)
    sol = ps.solve_gram(ps.build_H(f.Z))
    assert not sol.spd_projected and sol.rank_H == 6
    resid = np.diag(f.Z.T @ sol.G @ f.Z) - 1
    assert np.max(np.abs(resid)) <= 1e-10
    np.testing.assert_allclose(sol.R.T @ sol.R, sol.G, rtol=1e-10, atol=1e-12)
    assert np.all(np.diag(sol.R) > 0) and np.allclose(sol.R, np.triu(sol.R))


def test_solve_gram_noisy_consistency(stack):
    f = ps.rank3_truncate(ps.add_noise(stack, 0.1, 4))
    sol = ps.solve_gram(ps.build_H(f.Z))
    assert np.max(np.abs(np.diag(f.Z.T @ sol.G @ f.Z) - 1)) <= 0.1


def test_spd_projection():
    # data exactly consistent with a slightly indefinite Gram matrix
    G_true = np.diag([1.0, 1.0, -1e-9])
    rng = np.random.default_rng(1)
    Z = rng.standard_normal((3, 8))
    Z /= np.sqrt(np.einsum("it,ij,jt->t", Z, G_true, Z))
    sol = ps.solve_gram(ps.build_H(Z))
    assert sol.spd_projected
    floor = 1e-8 * np.trace(G_true) / 3
    assert np.linalg.eigvalsh(sol.G).min() == pytest.approx(floor, rel=1e-3)
    np.testing.assert_allclose(sol.R.T @ sol.R, sol.G, rtol=1e-10, atol=1e-14)


def test_gram_too_indefinite():
    G_true = np.diag([1.0, 1.0, -0.5])
    rng = np.random.default_rng(2)
    Z = rng.standard_normal((3, 40))
    Z = Z[:, np.einsum("it,ij,jt->t", Z, G_true, Z) > 0.1][:, :8]
    Z /= np.sqrt(np.einsum("it,ij,jt->t", Z, G_true, Z))
    with pytest.raises(ps.InconsistentDataError):
        ps.solve_gram(ps.build_H(Z))


def test_solve_unknown_noiseless(scene, stack):
    _, _, surface, lights = scene
    res = ps.solve_unknown(stack)
    assert np.max(np.abs(np.linalg.norm(res.lights, axis=0) - 1)) <= 1e-8
    al = ps.procrustes_align(res.lights, lights)
    assert al.max_error <= 1e-8
    recon = res.surface.albedo[:, None] * (res.surface.normals.T @ res.lights)
    assert np.linalg.norm(recon - stack.values) / np.linalg.norm(stack.values) <= 1e-8
    np.testing.assert_allclose(res.surface.albedo, 1.0, rtol=1e-10)
    assert ps.angular_error(al.Q @ res.surface.normals, surface.normals).max() <= 1e-8


def test_solve_unknown_noisy(scene, stack):
    res = ps.solve_unknown(ps.add_noise(stack, 0.1, 0))
    assert ps.procrustes_align(res.lights, scene[3]).max_error <= 2e-2


def test_solve_unknown_scale_equivariance(stack):
    base = ps.solve_unknown(stack)
    scaled = ps.solve_unknown(3.0 * stack.values)
    np.testing.assert_allclose(scaled.surface.albedo, 3.0 * base.surface.albedo, rtol=1e-9)
    assert ps.procrustes_align(scaled.lights, base.lights).residual <= 1e-9


def test_solve_unknown_intensities(scene, stack):
    _, _, _, lights = scene
    c = np.array([1.0, 2.0, 0.5, 1.5, 1.0, 3.0, 0.8])
    res = ps.solve_unknown(stack.values * c, intensities=c)
    np.testing.assert_allclose(np.linalg.norm(res.lights, axis=0), c, rtol=1e-8)
    assert ps.procrustes_align(res.lights / c, lights).max_error <= 1e-8


@pytest.mark.parametrize("q", range(1, 6))
def test_solve_unknown_few_images(scene, q):
    grid, _, surface, lights = scene
    M = ps.render(surface, lights.directions[:, :q], grid)
    with pytest.raises((TooFewImagesError, DegenerateDataError)):
        ps.solve_unknown(M)


def test_fix_orientation():
    rng = np.random.default_rng(0)
    N = rng.standard_normal((3, 50))
    N[2] = np.abs(N[2]) + 0.1
    L = rng.standard_normal((3, 7))
    N2, L2, Q = ps.fix_orientation(N, L)
    np.testing.assert_array_equal(Q, np.eye(3))
    np.testing.assert_array_equal(N2, N)
    flipped = N * np.array([[1], [1], [-1]])
    N3, L3, Q = ps.fix_orientation(flipped, L)
    np.testing.assert_array_equal(Q, np.diag([1.0, 1.0, -1.0]))
    np.testing.assert_array_equal(N3, N)
    np.testing.assert_allclose(N3.T @ L3, flipped.T @ L, atol=1e-12)


@pytest.mark.parametrize("q", range(6, 13))
@pytest.mark.parametrize("delta", [0.5, 1.0, 2.0])
def test_ring_detection_and_repair(q, delta):
    grid, _, surface, _ = demo_scene(r=30, A=2.02)
    ring = ps.make_light_ring(q, delta)
    with pytest.raises(DegenerateLightingError):
        ps.solve_unknown(ps.render(surface, ring, grid))
    tilted = ps.tilt_light(ring, 0, 5.0)
    sol = ps.solve_gram(ps.build_H(ps.rank3_truncate(ps.render(surface, tilted, grid)).Z))
    assert sol.cond_ratio_H > 1e-6


def test_gauge_invariance(scene, stack, rng):
    grid, _, surface, lights = scene
    base = ps.solve_unknown(stack)
    for _ in range(5):
        Q = random_orthogonal(rng)
        M = ps.render(ps.SurfaceField(Q @ surface.normals), Q @ lights.directions, grid)
        res = ps.solve_unknown(M)
        np.testing.assert_allclose(res.factors.sigma[:3], base.factors.sigma[:3], rtol=1e-10)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(res.gram.G), np.linalg.eigvalsh(base.gram.G), rtol=1e-10
        )
        np.testing.assert_allclose(res.surface.albedo, base.surface.albedo, rtol=1e-10)
