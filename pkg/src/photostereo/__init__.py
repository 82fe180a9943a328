"""Photometric stereo with known or unknown point lights at infinity."""

from .errors import (
    ConvergenceError,
    DegeneracyError,
    DegenerateDataError,
    DegenerateLightingError,
    DegenerateLightsError,
    GrazingNormalError,
    InconsistentDataError,
    InvalidArgumentError,
    PhotostereoError,
    TooFewImagesError,
)
from .factorize import (
    GramSolution,
    Rank3Factors,
    build_H,
    fix_orientation,
    rank3_truncate,
    solve_gram,
    solve_known,
    solve_unknown,
)
from .grid import Grid, lex_index, lex_inverse, make_grid
from .integrate import (
    GradientField,
    LaplacianField,
    divergence,
    gradient_from_normals,
    integrate_normals,
    poisson_matrix,
    poisson_solve,
)
from .metrics import AlignmentResult, angular_error, procrustes_align, spectrum_report, surface_rmse
from .render import ImageStack, SurfaceField, add_noise, normals_from_height, render
from .scene import (
    AlbedoMap,
    HeightField,
    LightSet,
    make_albedo,
    make_light_ring,
    make_surface,
    random_lights,
    tilt_light,
)

__version__ = "0.1.0"
