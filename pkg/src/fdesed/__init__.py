"""Suspended sediment concentration profiles from fractional differential entropy."""

__version__ = "0.1.0"

from .entropy import (
    MultiplierPair,
    discrete_fde,
    euler_lagrange_residual,
    fde_entropy_of_pdf,
    fde_pdf,
    fde_pdf_plus_branch,
)
from .quadrature import QuadratureConfig, integrate
from .series import (
    TruncationConfig,
    cdf_two_term,
    constraint_residuals,
    series_integral_cf,
    series_integral_f,
    solve_multipliers,
)
from .profile import (
    FdeModelParameters,
    FlowGeometry,
    concentration_profile,
    dimensional_concentration,
    fit_profile,
    fit_shape_parameter,
    hypothetical_cdf,
    mean_normalized_concentration,
)
from .baselines import (
    RouseSpec,
    ShannonSpec,
    TsallisSpec,
    rouse_profile,
    shannon_profile,
    solve_shannon_N,
    tsallis_profile,
)
from .metrics import ErrorReport, PairedSeries, error_report
from .dataio import (
    ParameterRecord,
    SedimentProfileDataset,
    emit_plot_data,
    load_parameters,
    load_profile,
    normalize,
    save_parameters,
)
