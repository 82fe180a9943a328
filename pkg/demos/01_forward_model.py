"""
Rendering a Lambertian surface
==============================

Build the 100 x 100 test scene, light it from seven directions and look at
the singular values of the observation matrix: three are significant, the
rest sit at roundoff level.
"""

# %%
import numpy as np

import photostereo as ps

grid = ps.make_grid(100, 100, 2.02)
print(f"pixel pitch h = {grid.h:.4f}, p = {grid.p} pixels")

u = ps.make_surface(grid, "multi-peak")
surface = ps.normals_from_height(u)
lights = ps.tilt_light(ps.make_light_ring(7, 1.5), 0, 20.0)
stack = ps.render(surface, lights, grid)
print("observation matrix:", stack.values.shape, "negative entries:", stack.shadow_fraction)

# %%
# Singular values: the data matrix is rank 3 up to roundoff.
report = ps.spectrum_report(stack)
np.set_printoptions(precision=3)
print("singular values:", report["singular_values"])
print("sigma4 / sigma1 =", report["sigma4_over_sigma1"])

# %%
# With 10% noise the matrix becomes full rank, but the noise floor is flat.
noisy = ps.add_noise(stack, 0.1, seed=0)
print("noisy singular values:", ps.spectrum_report(noisy)["singular_values"])

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 8, figsize=(16, 2.4))
    axes[0].imshow(u.values.T, origin="lower")
    axes[0].set_title("height")
    for t in range(7):
        axes[t + 1].imshow(stack.image(t).T, origin="lower", cmap="gray")
        axes[t + 1].set_title(f"light {t + 1}")
    for ax in axes:
        ax.axis("off")
    fig.savefig("forward_model.png", dpi=80, bbox_inches="tight")
    print("wrote forward_model.png")
except ImportError:
    pass
