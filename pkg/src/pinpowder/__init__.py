"""Exact pinwheel/kite-domino tilings and radial diffraction toolkit."""

from .exact import ExactPoint, Isometry, RadiusKey, Triangle, squared_distance
from .shelling import (
    GaussianRotation,
    csl_index,
    enumerate_shells,
    ideal_count_a,
    shelling_count_square,
)
from .substitution import (
    Patch,
    derive_dissection,
    generate_patch,
    kd_substitution_matrix,
    merge_to_kite_domino,
    substitute,
    vertex_stars,
)
from .radial import (
    cross_correlation_uniformity,
    distance_set,
    frequency_module_check,
    radial_autocorrelation,
)
from .diffraction import (
    bessel_j,
    bessel_sum_curve,
    powder_curve_exact,
    psf_gaussian_check,
    radial_transform_mu,
    superposition_diffraction,
)

__version__ = "0.1.0"
