"""Closed-form long-horizon growth rates for the five market models.

Each ``lambda_*`` function returns the exponential growth rate of the
expected power utility of wealth for a fixed stock fraction ``alpha``.
Radicals are evaluated in a rationalized form so that the bond-only value
theta * r is reproduced exactly at alpha = 0 instead of through a
cancellation of two large terms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate

from .errors import InternalInvariantViolation, OutOfRange, QuadratureFailure
from .params import (
    ConstantJump,
    ExponentialJump,
    GbmParams,
    HestonParams,
    JumpDiffusionParams,
    JumpLaw,
    ModelSpec,
    ThreeHalvesParams,
    Utility,
    VasicekParams,
)
from .specfun import kummer_m, log_gamma, upper_incomplete_gamma_scaled

__all__ = [
    "HestonCoefficients",
    "GrowthCurve",
    "heston_coefficients",
    "lambda_gbm",
    "lambda_heston",
    "lambda_three_halves",
    "lambda_jump",
    "lambda_vasicek",
    "laplace_three_halves_finite_t",
    "jump_utility_moment",
    "jump_derivative_moment",
    "jump_mean",
    "growth_rate",
    "growth_curve",
]

# Optimizers may probe marginally outside [0, 1]; anything within this slack
# is clamped, anything beyond is rejected.
ALPHA_SLACK = 1e-9

DENSITY_QUAD_ABS_TOL = 1e-9
DENSITY_QUAD_LIMIT = 10_000

ArrayLike = Union[float, np.ndarray]


def _clamp_alpha(alpha: ArrayLike) -> ArrayLike:
    a = np.asarray(alpha, dtype=float)
    if np.any(a < -ALPHA_SLACK) or np.any(a > 1.0 + ALPHA_SLACK):
        raise OutOfRange(f"alpha must lie in [0, 1], got {alpha!r}")
    a = np.clip(a, 0.0, 1.0)
    if np.ndim(alpha) == 0:
        return float(a)
    return a


def _diffusion_growth(mu, r, sigma, theta, alpha):
    """Growth-rate contribution of a Brownian stock plus constant rate."""
    return theta * (alpha * mu + (1.0 - alpha) * r) + 0.5 * (
        theta * theta - theta
    ) * alpha * alpha * sigma * sigma


@dataclass(frozen=True)
class HestonCoefficients:
    """Constant bundle describing the Heston growth rate as
    -sqrt(c1*a^2 - 2*c2*a + c3) + c4*a + c0."""

    c0: float
    c1: float
    c2: float
    c3: float
    c4: float


def heston_coefficients(p: HestonParams, u: Utility) -> HestonCoefficients:
    """Coefficient bundle for the Heston growth rate.

    Raises InternalInvariantViolation if the positivity identity
    c1*c3 - c2**2 == kappa^6 gamma^4 (theta - theta^2) / delta^6 fails
    beyond 1e-12 relative, which would indicate an arithmetic bug.
    """
    theta = u.theta
    k, g, d, rho = p.kappa, p.gamma_level, p.delta, p.rho
    k2g2_d4 = (k * k * g * g) / d**4
    c0 = k * k * g / (d * d) + theta * p.r
    c1 = k2g2_d4 * (d * d * theta - d * d * theta * theta * (1.0 - rho * rho))
    c2 = d * k * rho * theta * k2g2_d4
    c3 = k2g2_d4 * (k * k)
    c4 = -theta * rho * k * g / d + theta * (p.mu - p.r)

    lhs = c1 * c3 - c2 * c2
    rhs = k**6 * g**4 * (theta - theta * theta) / d**6
    # the second tolerance term covers the cancellation c1*c3 - c2^2 itself,
    # which exceeds 1e-12 relative when theta -> 1 even for correct arithmetic
    if abs(lhs - rhs) > 1e-12 * abs(rhs) + 32.0 * np.finfo(float).eps * (c1 * c3 + c2 * c2):
        raise InternalInvariantViolation(
            f"Heston coefficient identity failed: c1*c3 - c2^2 = {lhs!r}, expected {rhs!r}"
        )
    return HestonCoefficients(c0=c0, c1=c1, c2=c2, c3=c3, c4=c4)


def lambda_gbm(p: GbmParams, u: Utility, alpha: ArrayLike) -> ArrayLike:
    """Growth rate for a geometric Brownian stock with constant rate."""
    a = _clamp_alpha(alpha)
    return _diffusion_growth(p.mu, p.r, p.sigma, u.theta, a)


def lambda_heston(p: HestonParams, u: Utility, alpha: ArrayLike) -> ArrayLike:
    """Heston growth rate; independent of the initial variance nu0."""
    a = _clamp_alpha(alpha)
    c = heston_coefficients(p, u)
    s = p.kappa * p.kappa * p.gamma_level / (p.delta * p.delta)
    num = c.c1 * a * a - 2.0 * c.c2 * a
    rad = num + c.c3
    return u.theta * p.r + c.c4 * a - num / (np.sqrt(rad) + s)


def lambda_three_halves(p: ThreeHalvesParams, u: Utility, alpha: ArrayLike) -> ArrayLike:
    """3/2-model growth rate; independent of the initial variance nu0."""
    a = _clamp_alpha(alpha)
    theta = u.theta
    c = 0.5 + p.kappa / (p.delta * p.delta)
    q = a * a * (theta - theta * theta) / (p.delta * p.delta)
    kg = p.kappa * p.gamma_level
    return theta * (a * p.mu + (1.0 - a) * p.r) - kg * q / (np.sqrt(c * c + q) + c)


def laplace_three_halves_finite_t(
    p: ThreeHalvesParams, lambda_l: float, t: float
) -> float:
    """Finite-horizon Laplace transform of the integrated 3/2 variance.

    Evaluates E[exp(-lambda_l * integral of nu over [0, t])] through the
    Kummer-function closed form. The gamma prefactor and the power of the
    shrinking argument are combined in log space so the expression stays
    finite for any horizon.
    """
    lambda_l = float(lambda_l)
    t = float(t)
    if lambda_l <= 0.0:
        raise OutOfRange(f"lambda_l must be > 0, got {lambda_l}")
    if t <= 0.0:
        raise OutOfRange(f"t must be > 0, got {t}")
    d2 = p.delta * p.delta
    c = 0.5 + p.kappa / d2
    root = math.sqrt(c * c + 2.0 * lambda_l / d2)
    a = (2.0 * lambda_l / d2) / (root + c)
    b = 1.0 + 2.0 * root
    kg = p.kappa * p.gamma_level
    # log of 2*kappa*gamma / (delta^2 nu0 (e^{kg t} - 1)), stable for large t
    log_z = math.log(2.0 * kg / (d2 * p.nu0)) - (kg * t + math.log1p(-math.exp(-kg * t)))
    z = math.exp(log_z)
    m = kummer_m(a, b, -z)
    log_front = log_gamma(b - a) - log_gamma(b) + a * log_z
    return math.exp(log_front) * m.value


def jump_mean(law: JumpLaw) -> float:
    """Mean jump factor E[Y]."""
    return law.mean()


def _exponential_moment(rate: float, theta: float, alpha: float) -> float:
    """E[(alpha*(Y-1)+1)^theta] for Y ~ Exponential(rate), alpha in (0, 1]."""
    x = rate * (1.0 / alpha - 1.0)
    scaled = upper_incomplete_gamma_scaled(theta + 1.0, x)
    return (alpha / rate) ** theta * scaled.value


def _density_quad(f, lo, hi, abs_tol, limit=DENSITY_QUAD_LIMIT, fail_tol=None):
    if fail_tol is None:
        fail_tol = 10.0 * abs_tol
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(f, lo, hi, epsabs=abs_tol, epsrel=0.0, limit=limit)
    if err > fail_tol + 1e-13 * abs(value):
        raise QuadratureFailure(
            f"quadrature error estimate {err!r} exceeds tolerance {fail_tol!r}"
        )
    return value


def jump_utility_moment(law: JumpLaw, u: Utility, alpha: float) -> float:
    """E[(alpha*(Y-1)+1)^theta] for the given jump law.

    Constant and exponential laws use closed forms (the latter through a
    scaled upper incomplete gamma); density laws are integrated adaptively
    to 1e-9 absolute.
    """
    a = _clamp_alpha(float(alpha))
    theta = u.theta
    if a == 0.0:
        return 1.0
    if isinstance(law, ConstantJump):
        return (a * (law.y - 1.0) + 1.0) ** theta
    if isinstance(law, ExponentialJump):
        return _exponential_moment(law.rate, theta, a)
    return _density_quad(
        lambda y: (a * y + 1.0 - a) ** theta * law.density(y),
        0.0,
        law.bound,
        DENSITY_QUAD_ABS_TOL,
    )


def jump_derivative_moment(law: JumpLaw, u: Utility, alpha: float) -> float:
    """E[(alpha*(Y-1)+1)^(theta-1) * (Y-1)], the jump term of the slope.

    Closed form for constant jumps; quadrature for exponential and density
    laws (differentiating the incomplete-gamma identity would compound
    error in the root finder).
    """
    a = _clamp_alpha(float(alpha))
    theta = u.theta
    if isinstance(law, ConstantJump):
        return (a * (law.y - 1.0) + 1.0) ** (theta - 1.0) * (law.y - 1.0)
    if a == 0.0:
        return jump_mean(law) - 1.0
    if isinstance(law, ExponentialJump):
        rate = law.rate
        return _density_quad(
            lambda y: (a * y + 1.0 - a) ** (theta - 1.0)
            * (y - 1.0)
            * rate
            * math.exp(-rate * y),
            0.0,
            np.inf,
            1e-11,
            limit=500,
            fail_tol=1e-7,
        )
    return _density_quad(
        lambda y: (a * y + 1.0 - a) ** (theta - 1.0) * (y - 1.0) * law.density(y),
        0.0,
        law.bound,
        1e-11,
        fail_tol=1e-7,
    )


def lambda_jump(p: JumpDiffusionParams, u: Utility, alpha: ArrayLike) -> ArrayLike:
    """Jump-diffusion growth rate."""
    a = _clamp_alpha(alpha)
    if np.ndim(a) == 0:
        moment = jump_utility_moment(p.jump, u, a)
        base = _diffusion_growth(p.mu, p.r, p.sigma, u.theta, a)
        return base + p.lambda_j * (moment - 1.0)
    moments = np.array([jump_utility_moment(p.jump, u, ai) for ai in a])
    base = _diffusion_growth(p.mu, p.r, p.sigma, u.theta, a)
    return base + p.lambda_j * (moments - 1.0)


def lambda_vasicek(p: VasicekParams, u: Utility, alpha: ArrayLike) -> ArrayLike:
    """Growth rate for a Black-Scholes stock against an OU short rate.

    Exactly quadratic in alpha and independent of the initial rate r0.
    """
    a = _clamp_alpha(alpha)
    theta = u.theta
    level = theta * (1.0 - a) / p.kappa + theta * a * p.sigma * p.rho / p.delta
    return (
        p.kappa * p.gamma_level * level
        + 0.5 * p.delta * p.delta * level * level
        - theta * a * p.sigma * p.kappa * p.gamma_level * p.rho / p.delta
        + 0.5 * theta * theta * a * a * p.sigma * p.sigma * (1.0 - p.rho * p.rho)
        + theta * a * p.mu
        - 0.5 * theta * a * a * p.sigma * p.sigma
    )


def growth_rate(model: ModelSpec, u: Utility, alpha: ArrayLike) -> ArrayLike:
    """Dispatch to the closed-form growth rate of the given model."""
    if isinstance(model, GbmParams):
        return lambda_gbm(model, u, alpha)
    if isinstance(model, HestonParams):
        return lambda_heston(model, u, alpha)
    if isinstance(model, ThreeHalvesParams):
        return lambda_three_halves(model, u, alpha)
    if isinstance(model, JumpDiffusionParams):
        return lambda_jump(model, u, alpha)
    if isinstance(model, VasicekParams):
        return lambda_vasicek(model, u, alpha)
    raise OutOfRange(f"unsupported model type {type(model).__name__}")


@dataclass(frozen=True)
class GrowthCurve:
    """Growth rate sampled on a strictly increasing alpha grid over [0, 1]."""

    model: ModelSpec
    theta: Utility
    alphas: np.ndarray
    lambdas: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float)
        if a.size < 2 or a[0] != 0.0 or a[-1] != 1.0 or np.any(np.diff(a) <= 0.0):
            raise OutOfRange("alpha grid must increase strictly from 0 to 1")

    @property
    def samples(self):
        """List of (alpha, lambda) pairs."""
        return list(zip(self.alphas.tolist(), self.lambdas.tolist()))


def growth_curve(model: ModelSpec, u: Utility, n_points: int) -> GrowthCurve:
    """Sample the growth rate on a uniform n-point grid spanning [0, 1]."""
    n_points = int(n_points)
    if n_points < 2:
        raise OutOfRange(f"n_points must be >= 2, got {n_points}")
    alphas = np.linspace(0.0, 1.0, n_points)
    lambdas = np.asarray(growth_rate(model, u, alphas), dtype=float)
    return GrowthCurve(model=model, theta=u, alphas=alphas, lambdas=lambdas)
