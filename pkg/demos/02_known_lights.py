"""
Photometric stereo with known lights
====================================

With the light matrix at hand the scaled normals follow from one
pseudoinverse; albedo is the length of each recovered vector.
"""

# %%
import numpy as np

import photostereo as ps

grid = ps.make_grid(80, 60, 2.0)
u = ps.make_surface(grid, "multi-peak")
surface = ps.normals_from_height(u)
surface.albedo = ps.make_albedo(grid, "patterned", 0.9).values
lights = ps.random_lights(5, np.random.default_rng(1))

stack = ps.render(surface, lights, grid)
recovered = ps.solve_known(stack, lights)

# %%
print("max normal error (rad):", ps.angular_error(recovered.normals, surface.normals).max())
print("max albedo rel. error:", np.max(np.abs(recovered.albedo / surface.albedo - 1)))

# %%
# Coplanar lights cannot separate the three normal components.
flat_lights = np.array([[1.0, 0, -1, 0], [0, 1, 0, -1], [0, 0, 0, 0]])
try:
    ps.solve_known(stack.values[:, :4], flat_lights)
except ps.DegenerateLightsError as exc:
    print("rejected:", exc)
