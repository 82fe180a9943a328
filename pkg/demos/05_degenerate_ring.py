"""
Why lights on a ring are not enough
===================================

For lights on a circle at constant height the third column of ``H`` equals
``delta^2`` times the sum of the first two, so ``H`` has rank at most 5.
Raising one light fixes it.
"""

# %%
import numpy as np

import photostereo as ps

for delta in (0.5, 1.0, 2.0):
    L = ps.make_light_ring(8, delta).directions
    H = ps.build_H(L)
    sv = np.linalg.svd(H, compute_uv=False)
    dep = np.abs(H[:, 2] - delta**2 * (H[:, 0] + H[:, 1])).max()
    print(f"delta = {delta}: sigma_min/sigma_max = {sv[-1] / sv[0]:.1e}, |h3 - d^2(h1 + h2)| = {dep:.1e}")

# %%
grid = ps.make_grid(60, 60, 2.02)
surface = ps.normals_from_height(ps.make_surface(grid))
ring = ps.make_light_ring(8, 1.0)
for tilt in (0.0, 2.0, 5.0, 10.0):
    lights = ps.tilt_light(ring, 0, tilt)
    H = ps.build_H(ps.rank3_truncate(ps.render(surface, lights, grid)).Z)
    sv = np.linalg.svd(H, compute_uv=False)
    print(f"tilt {tilt:4.1f} deg: sigma_min/sigma_max = {sv[-1] / sv[0]:.2e}")
