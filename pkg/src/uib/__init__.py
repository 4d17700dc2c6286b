"""Uniform-in-bandwidth functional limit laws for local empirical and quantile processes.

Exact evaluation of local processes, sup-norm distances to Strassen balls,
binomial tail bounds and reproducible desk-scale experiment drivers.
"""

from .empirical import SeedSpec, SortedSample, alpha, beta, build_sorted_sample, ecdf, generate_uniform, quantile
from .errors import UibError
from .local import local_empirical, local_quantile, log2fn, normalize, oscillation_modulus, sup_norm
from .paths import StepPath
from .strassen import dist_to_ball, dist_to_product_ball, min_energy_in_tube

__version__ = "0.1.0"

__all__ = [
    "SeedSpec",
    "SortedSample",
    "StepPath",
    "UibError",
    "alpha",
    "beta",
    "build_sorted_sample",
    "dist_to_ball",
    "dist_to_product_ball",
    "ecdf",
    "generate_uniform",
    "local_empirical",
    "local_quantile",
    "log2fn",
    "min_energy_in_tube",
    "normalize",
    "oscillation_modulus",
    "quantile",
    "sup_norm",
]
