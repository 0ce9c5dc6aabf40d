"""Archimedean side of the toolkit.

Smooth windows, Mellin transforms, the degree-three Bessel-type kernel and
its leading asymptotic, the additive-character expansion of the Kronecker
delta, the oscillatory integral transforms attached to the circle-method
analysis, and the triple divisor Voronoi identity check.
"""

from .bump import BumpFunction, canonical_bump, plateau_bump
from .constants import Constants, euler_gamma_series, stieltjes_gamma1_series
from .quadrature import QuadResult, osc_quad, simpson_grid
from .mellin import log_moment, mellin
from .kernels import (
    g0_asymptotic,
    g_ell,
    g_ell_many,
    g_kernel,
    g_kernel_many,
    kernel_table,
)
from .delta import DeltaExpansion, delta_eval, dfi_delta
from .oscint import (
    OscIntegralSpec,
    osc_composite,
    osc_poisson_kernel,
    osc_voronoi_kernel,
    stationary_p,
)
from .voronoi import (
    VoronoiReport,
    d3_partial_asymptotic,
    main_scale_calibration,
    voronoi_d3_check,
)

__all__ = [
    "BumpFunction",
    "canonical_bump",
    "plateau_bump",
    "Constants",
    "euler_gamma_series",
    "stieltjes_gamma1_series",
    "QuadResult",
    "osc_quad",
    "simpson_grid",
    "mellin",
    "log_moment",
    "g_kernel",
    "g_kernel_many",
    "g_ell",
    "g_ell_many",
    "g0_asymptotic",
    "kernel_table",
    "DeltaExpansion",
    "dfi_delta",
    "delta_eval",
    "OscIntegralSpec",
    "osc_voronoi_kernel",
    "osc_poisson_kernel",
    "osc_composite",
    "stationary_p",
    "VoronoiReport",
    "voronoi_d3_check",
    "main_scale_calibration",
    "d3_partial_asymptotic",
]
