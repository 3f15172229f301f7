"""Distribution of ``F = ln det(Q + S)`` for Gaussian skew-circulant disorder ``S``.

The characteristic function factorises over eigenvalue pairs and is known in
closed form through the confluent hypergeometric function. This package
evaluates it, extracts cumulants, inverts it to a density, samples it by
brute force, and compares the result against log-normal, Gaussian and
Edgeworth models.
"""

from .analysis import (
    LogNormalParams,
    ScalingFit,
    SimilarityReport,
    fit_lognormal,
    gaussian_limit_check,
    hellinger,
    jsd,
    kl,
    lognormal_cumulants,
    lognormal_grid,
    lognormal_pdf,
    scaling_regression,
    similarity,
)
from .charfun import DisorderScale, chi, k_support, log_chi, log_chi_single
from .cumulants import (
    CumulantSet,
    asymptotic_law,
    asymptotic_predict,
    cumulant_ratio,
    cumulants_faa_di_bruno,
    cumulants_finite_difference,
    cumulants_series,
    kappa1,
)
from .errors import (
    DomainError,
    FitFailure,
    InvalidArgument,
    NoDecayError,
    PrecisionLossError,
    SingularShiftError,
    UnsupportedOrder,
)
from .inversion import DistributionGrid, bin_probabilities, default_grid, edgeworth4, gaussian_grid, invert
from .montecarlo import SampleBatch, empirical_cumulants, histogram, ks_compare, sample
from .skewcirc import SkewCirculant, Spectrum, build_Q, eigenvalues, log_det_shifted, q_phases, sample_disorder

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
