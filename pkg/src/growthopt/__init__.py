"""Long-horizon growth rates of expected power utility and the optimal
static stock/bond split, for five market models, with independent ODE and
Monte Carlo verification."""

from .allocate import (
    AllocationDecision,
    numeric_argmax,
    optimal_allocation,
    optimal_gbm,
    optimal_heston,
    optimal_jump,
    optimal_three_halves,
    optimal_vasicek,
)
from .errors import (
    BadDensity,
    ConfigError,
    DegenerateVariance,
    DomainExceeded,
    DuplicateKey,
    DuplicateUtility,
    FellerViolation,
    GrowthOptError,
    InternalInvariantViolation,
    InvalidParameters,
    MissingKey,
    NonFinitePath,
    OutOfRange,
    PoleAtB,
    QuadratureFailure,
    StepSizeTooLarge,
    TypeMismatch,
    UnknownKey,
)
from .growth import (
    GrowthCurve,
    HestonCoefficients,
    growth_curve,
    growth_rate,
    heston_coefficients,
    jump_derivative_moment,
    jump_utility_moment,
    lambda_gbm,
    lambda_heston,
    lambda_jump,
    lambda_three_halves,
    lambda_vasicek,
    laplace_three_halves_finite_t,
)
from .params import (
    ConstantJump,
    DensityJump,
    ExponentialJump,
    GbmParams,
    HestonParams,
    JumpDiffusionParams,
    JumpLaw,
    ModelSpec,
    ThreeHalvesParams,
    Utility,
    VasicekParams,
    theta_from_gamma,
    validate,
)
from .specfun import (
    SpecFunResult,
    kummer_m,
    log_gamma,
    upper_incomplete_gamma,
    upper_incomplete_gamma_scaled,
)
from .verify import (
    LaplaceEstimate,
    OdeTrace,
    SimEstimate,
    integrate_heston_riccati,
    integrate_vasicek_ode,
    mc_growth_estimate,
    mc_laplace_three_halves,
)

__version__ = "0.1.0"
