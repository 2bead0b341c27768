"""rieszlab: fractional Laplacians, Riesz potentials and their p-integrable variants on grids,
with verification checks and sparse stochastic processes driven by Poisson noise."""

from .errors import (
    ConfigError,
    DecayError,
    DomainTagError,
    EmptyWindow,
    GridIncompatible,
    HypothesisError,
    PoleError,
    RangeError,
    RieszLabError,
    SingularPoint,
    SpecError,
    UnsupportedOrder,
)
from .numerics import (
    Grid,
    MultiIndex,
    SampledField,
    continuous_ft,
    continuous_ift,
    gamma,
    integrate,
    multi_indices,
    read_field_csv,
    write_field_csv,
)
from .operators import (
    HKernel,
    OperatorResult,
    PotentialSpec,
    adjoint_integrable_potential,
    apply_multiplier,
    fractional_laplacian,
    generalized_riesz,
    h_kernel,
    integrable_potential_fourier,
    integrable_potential_spatial,
    riesz_potential_convolution,
    riesz_potential_fourier,
    taylor_coeffs,
)
from .process import (
    AmplitudeDist,
    CharFunctionalEstimate,
    PoissonConfig,
    PoissonRealization,
    charfun_closed_form,
    charfun_monte_carlo,
    delta_approx_convergence,
    evaluate_functional,
    pointwise_charfun,
    pointwise_charfun_monte_carlo,
    render_field,
    sample_realization,
    windowed_functional,
)
from .symbols import (
    HomogeneousSymbol,
    RadialPolyKernel,
    kernel_derivative,
    kernel_eval,
    radial_symbol,
    riesz_constant,
)
from .verification import CheckReport, TestFunction, default_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
