"""bilmax: a numerical laboratory for bilinear Fourier multipliers,
their maximal operators, and wavelet decompositions on finite grids."""

from .coeffs import (
    CoeffTree,
    ColumnPartition,
    WaveletSumSymbol,
    analyze,
    coeff_decay_profile,
    column_partition,
    diagonal_split,
    reconstruct,
)
from .errors import (
    BilmaxError,
    ConfigError,
    DomainError,
    FitError,
    InvalidGridError,
    InvalidParameterError,
    InvalidSplitError,
    NumericError,
    ResolutionError,
    TableError,
    UnsupportedOrderError,
)
from .fits import DecayFitReport, fit_log2_slope
from .grids import (
    Field,
    Grid,
    apply_freq_multiplier,
    boundary_decay,
    fft_forward,
    fft_inverse,
    lp_norm,
    require_boundary_decay,
    sobolev_norm,
)
from .harness import (
    EXPERIMENTS,
    TrialEnsemble,
    bessel_identity_check,
    convergence_study,
    field_from_spectrum,
    norm_ratio_estimate,
    predicted_bound_C,
    random_band_limited,
    smooth_spectrum,
    summed_diagonal_bound,
)
from .operators import (
    BilinearResult,
    DilationGrid,
    apply_bilinear,
    apply_bilinear_direct,
    g_function,
    hl_maximal,
    hl_maximal_direct,
    kernel,
    maximal_operator,
    tilde_operator,
)
from .symbols import (
    AnnularPiece,
    DecayClassParams,
    DyadicPartition,
    RadialSymbol,
    SeparableSymbol,
    Symbol,
    ball_piece,
    bessel_j,
    bochner_riesz_symbol,
    constant_symbol,
    dyadic_pieces,
    m_alpha_symbol,
    radial_derivative_symbol,
    radial_lp_norm,
    rescale_piece,
    sobolev_norm_radial,
)
from .wavelets import (
    WaveletIndex,
    WaveletSystem,
    build_wavelet_system,
    cached_wavelet_system,
    tensor_wavelet_eval,
)

__version__ = "0.1.0"
