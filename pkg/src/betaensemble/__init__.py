"""Refined topological recursion for one-cut beta-ensembles in the Zhukovsky variable."""

from .correlators import CorrelatorEngine
from .density import DensityModel, DensitySeries, ThetaGrid, combined_density
from .errors import (
    BetaEnsembleError,
    ConfigError,
    ContourError,
    CurveError,
    DomainError,
    PoleError,
    SolverError,
)
from .kernel import kernel_S, kernel_S_dz
from .numerics import ContourSpec, Jet, contour_integral
from .sampler import EnsembleConfig, Histogram, histogram_in_theta, log_weight, run_chains
from .spectral import BetaParams, Potential, SpectralCurve, solve_endpoints

__version__ = "0.1.0"
