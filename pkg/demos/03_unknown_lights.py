"""
Recovering the lights from the images
=====================================

Truncated SVD, the Gram system ``H g = 1``, Cholesky, and then alignment
with the true lights.  The recovered scene is only defined up to an
orthogonal transformation, so comparisons go through Procrustes.
"""

# %%
import numpy as np

import photostereo as ps

grid = ps.make_grid(100, 100, 2.02)
u = ps.make_surface(grid, "multi-peak")
surface = ps.normals_from_height(u)
lights = ps.tilt_light(ps.make_light_ring(7, 1.5), 0, 20.0)
stack = ps.render(surface, lights, grid)

res = ps.solve_unknown(stack)
print("sigma(H):", res.gram.sigma_H)
print("Gram matrix:\n", res.gram.G)
print("light norms:", np.linalg.norm(res.lights, axis=0))

# %%
align = ps.procrustes_align(res.lights, lights)
print("aligned light error, max (rad):", align.max_error)
print("det Q:", np.linalg.det(align.Q))

# %%
# Same run with 10% noise.
for seed in range(3):
    noisy = ps.add_noise(stack, 0.1, seed)
    est = ps.solve_unknown(noisy)
    print(f"seed {seed}: light error {ps.procrustes_align(est.lights, lights).max_error:.2e}")

# %%
# Fewer than six images leave the Gram matrix underdetermined.
try:
    ps.solve_unknown(ps.render(surface, lights.directions[:, :5], grid))
except ps.TooFewImagesError as exc:
    print("rejected:", exc)
