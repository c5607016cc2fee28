"""Computational free probability for compound Wishart and signal-plus-noise
random matrix models.

Three independent routes to the same spectra: exact non-crossing-partition
combinatorics on truncated moment series, a C^2-valued subordination fixed
point with Stieltjes inversion, and finite-dimensional Monte Carlo; plus
recovery of model parameters from moment data by free deconvolution.
"""

from .errors import (
    BackendMismatchError,
    DimensionMismatchError,
    DomainError,
    EigensolverError,
    FreeDeconvError,
    InsufficientOrderError,
    MalformedPartitionError,
    NoConvergenceError,
    NonrealRootsError,
    NonSelfadjointError,
    NotInvertibleError,
    OrderMismatchError,
    OrderTooLargeError,
    OrderTooSmallError,
    RecoveryFailedError,
    SigmaZeroError,
)
from .ncpart import (
    NcPartition,
    catalan,
    coef_product,
    enumerate_nc,
    is_noncrossing,
    kreweras,
)
from .series import (
    FLOAT,
    RATIONAL,
    MomentSeries,
    boxed_conv,
    boxed_inverse,
    delta_series,
    free_add_conv,
    free_mult_deconv,
    moment_from_r,
    r_transform,
    scale_argument,
    zeta_series,
)
from .models import (
    CwModel,
    IdentifiabilityReport,
    RecoveryReport,
    SpnModel,
    atomic_moments,
    cw_moments,
    cw_r_transform,
    cw_recover_eigenvalues,
    delta_moments,
    f_lambda,
    free_poisson_r,
    spn_decompose,
    spn_moments,
    spn_recover,
    verify_identifiability,
)
from .subordination import (
    CPoint2,
    DensityCurve,
    SubordinationResult,
    curve_cdf,
    curve_moment,
    eta,
    g_lambda_atoms,
    solve_subordination,
    spn_density,
)
from .randmat import (
    EmpiricalSpectrum,
    GinibreSpec,
    cw_sampler,
    eigenvalues_selfadjoint,
    empirical_spectrum,
    realize_cw,
    realize_spn,
    sample_ginibre,
    scale_cw_model,
    scale_spn_model,
    spn_sampler,
    trial_seeds,
)

__version__ = "0.1.0"
