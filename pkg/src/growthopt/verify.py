"""Independent numeric oracles: ODE integration and Monte Carlo simulation.

The ODE side integrates the exponential-ansatz systems behind the Heston
and OU-rate growth rates with a classical fixed-step RK4 and reports the
closed-form limits they must approach. The Monte Carlo side simulates the
wealth process of every model and estimates the finite-horizon growth rate
of the expected power utility.

Simulation is deterministic by construction: paths are split into
fixed-size blocks, each block draws from its own counter-based stream
derived from the master seed, and partial results are combined in block
order, so the estimate is bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateVariance,
    NonFinitePath,
    OutOfRange,
    StepSizeTooLarge,
)
from .growth import _clamp_alpha
from .params import (
    ConstantJump,
    ExponentialJump,
    GbmParams,
    HestonParams,
    JumpDiffusionParams,
    ModelSpec,
    ThreeHalvesParams,
    Utility,
    VasicekParams,
)

__all__ = [
    "OdeTrace",
    "SimEstimate",
    "LaplaceEstimate",
    "integrate_heston_riccati",
    "integrate_vasicek_ode",
    "mc_growth_estimate",
    "mc_laplace_three_halves",
]

# Paths per RNG block; fixed so results do not depend on the worker count.
BLOCK_SIZE = 16384

# Reciprocal-variance floor guarding 1/x after a (measure-zero) truncation.
_RECIP_FLOOR = 1e-12


@dataclass(frozen=True)
class OdeTrace:
    """RK4 trace of the exponent pair (A(t), B(t)) with its closed-form limits."""

    times: np.ndarray
    a_values: np.ndarray
    b_values: np.ndarray
    b_limit_closed_form: float
    a_slope_closed_form: float


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo estimate of (1/t) log E[(V_t/V_0)^theta]."""

    lambda_hat: float
    std_error: float
    horizon_t: float
    n_paths: int
    n_steps: int
    seed: int


@dataclass(frozen=True)
class LaplaceEstimate:
    """Monte Carlo mean of exp(-lambda_l * integrated variance)."""

    mean: float
    std_error: float
    horizon_t: float
    n_paths: int
    n_steps: int
    seed: int


def _rk4_quadratic_trace(qa, qb, qc, pa, pb, b0, t_end, dt, b_limit):
    """Integrate B' = qa*B^2 + qb*B + qc, A' = pa*B^2 + pb*B from (0, b0).

    A step that moves B by more than half its remaining distance to the
    limit signals an unstable step size and raises.
    """
    t_end = float(t_end)
    dt = float(dt)
    if t_end <= 0.0 or dt <= 0.0 or dt > t_end:
        raise OutOfRange(f"need 0 < dt <= t_end, got dt={dt}, t_end={t_end}")
    n = max(1, int(round(t_end / dt)))
    h = t_end / n
    times = np.empty(n + 1)
    avals = np.empty(n + 1)
    bvals = np.empty(n + 1)
    times[0] = 0.0
    avals[0] = 0.0
    bvals[0] = b0
    a = 0.0
    b = b0
    h6 = h / 6.0
    for i in range(1, n + 1):
        k1 = qc + b * (qb + qa * b)
        b2 = b + 0.5 * h * k1
        k2 = qc + b2 * (qb + qa * b2)
        b3 = b + 0.5 * h * k2
        k3 = qc + b3 * (qb + qa * b3)
        b4 = b + h * k3
        k4 = qc + b4 * (qb + qa * b4)
        l1 = b * (pb + pa * b)
        l2 = b2 * (pb + pa * b2)
        l3 = b3 * (pb + pa * b3)
        l4 = b4 * (pb + pa * b4)
        b_new = b + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        a += h6 * (l1 + 2.0 * l2 + 2.0 * l3 + l4)
        if abs(b_new - b) > 0.5 * abs(b - b_limit) + 1e-12:
            raise StepSizeTooLarge(
                f"dt={h} moved B from {b!r} to {b_new!r} against limit "
                f"{b_limit!r}; decrease the step size"
            )
        b = b_new
        times[i] = i * h
        avals[i] = a
        bvals[i] = b
    return times, avals, bvals


def integrate_heston_riccati(
    p: HestonParams, u: Utility, alpha: float, t_end: float, dt: float
) -> OdeTrace:
    """Integrate the Heston exponent system and report its limits.

    B solves the Riccati equation B' = -kappa*B + delta^2 B^2 / 2 + q and
    converges to the smaller root; A' = kappa*gamma_level*B, so A(t)/t
    approaches the closed-form slope entering the growth rate.
    """
    alpha = float(_clamp_alpha(float(alpha)))
    theta = u.theta
    k, g, d, rho = p.kappa, p.gamma_level, p.delta, p.rho
    q = (theta * theta * alpha * alpha * (1.0 - rho * rho) - theta * alpha * alpha) / 2.0 + (
        k * alpha * rho * theta / d
    )
    disc = (k - d * theta * alpha * rho) ** 2 + d * d * alpha * alpha * (
        theta - theta * theta
    )
    sqrt_disc = math.sqrt(disc)
    b_limit = (k - sqrt_disc) / (d * d)
    a_slope = k * k * g / (d * d) - (k * g / (d * d)) * sqrt_disc
    b0 = theta * alpha * rho / d
    times, avals, bvals = _rk4_quadratic_trace(
        qa=0.5 * d * d, qb=-k, qc=q, pa=0.0, pb=k * g,
        b0=b0, t_end=t_end, dt=dt, b_limit=b_limit,
    )
    return OdeTrace(times, avals, bvals, b_limit, a_slope)


def integrate_vasicek_ode(
    p: VasicekParams, u: Utility, alpha: float, t_end: float, dt: float
) -> OdeTrace:
    """Integrate the OU-rate exponent system.

    B is linear with closed-form solution b_limit + (B(0)-b_limit)e^{-kt};
    A' = kappa*gamma_level*B + delta^2 B^2 / 2.
    """
    alpha = float(_clamp_alpha(float(alpha)))
    theta = u.theta
    k, g, d, s, rho = p.kappa, p.gamma_level, p.delta, p.sigma, p.rho
    forcing = theta * (1.0 - alpha) + theta * alpha * s * k * rho / d
    b_limit = theta * (1.0 - alpha) / k + theta * alpha * s * rho / d
    a_slope = k * g * b_limit + 0.5 * d * d * b_limit * b_limit
    b0 = theta * alpha * s * rho / d
    times, avals, bvals = _rk4_quadratic_trace(
        qa=0.0, qb=-k, qc=forcing, pa=0.5 * d * d, pb=k * g,
        b0=b0, t_end=t_end, dt=dt, b_limit=b_limit,
    )
    return OdeTrace(times, avals, bvals, b_limit, a_slope)


def _block_sizes(n_paths: int):
    sizes = []
    remaining = n_paths
    while remaining > 0:
        take = min(BLOCK_SIZE, remaining)
        sizes.append(take)
        remaining -= take
    return sizes


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.Philox(ss))


def _sample_jump_factors(law, rng: np.random.Generator, n: int) -> np.ndarray:
    if isinstance(law, ConstantJump):
        return np.full(n, law.y)
    if isinstance(law, ExponentialJump):
        return rng.exponential(scale=1.0 / law.rate, size=n)
    # Tabulated inverse CDF on the declared support.
    grid = np.linspace(0.0, law.bound, 4097)
    pdf = np.array([max(law.density(y), 0.0) for y in grid])
    cdf = np.concatenate(([0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))))
    cdf /= cdf[-1]
    return np.interp(rng.random(n), cdf, grid)


def _log_ratio_gbm(p: GbmParams, u, alpha, t, n_steps, rng, size):
    z = rng.standard_normal(size)
    drift = (alpha * p.mu + (1.0 - alpha) * p.r - 0.5 * alpha * alpha * p.sigma**2) * t
    return drift + alpha * p.sigma * math.sqrt(t) * z


def _log_ratio_heston(p: HestonParams, u, alpha, t, n_steps, rng, size):
    dt = t / n_steps
    sq_dt = math.sqrt(dt)
    rho_c = math.sqrt(1.0 - p.rho * p.rho)
    drift_dt = (alpha * p.mu + (1.0 - alpha) * p.r) * dt
    nu = np.full(size, p.nu0)
    lr = np.zeros(size)
    for _ in range(n_steps):
        z = rng.standard_normal((2, size))
        dw = sq_dt * z[0]
        db = p.rho * dw + rho_c * sq_dt * z[1]
        nu_plus = np.maximum(nu, 0.0)
        assert nu_plus.min() >= 0.0
        sqrt_nu = np.sqrt(nu_plus)
        lr += drift_dt - 0.5 * alpha * alpha * nu_plus * dt + alpha * sqrt_nu * db
        nu = nu + p.kappa * (p.gamma_level - nu_plus) * dt + p.delta * sqrt_nu * dw
    return lr


def _recip_cir_step(p: ThreeHalvesParams, x, dt, dw):
    """Full-truncation Euler step of x = 1/nu, which follows a CIR process."""
    x_plus = np.maximum(x, 0.0)
    assert x_plus.min() >= 0.0
    drift = p.kappa + p.delta * p.delta - p.kappa * p.gamma_level * x_plus
    return x + drift * dt - p.delta * np.sqrt(x_plus) * dw, x_plus


def _log_ratio_three_halves(p: ThreeHalvesParams, u, alpha, t, n_steps, rng, size):
    dt = t / n_steps
    sq_dt = math.sqrt(dt)
    drift_dt = (alpha * p.mu + (1.0 - alpha) * p.r) * dt
    x = np.full(size, 1.0 / p.nu0)
    lr = np.zeros(size)
    for _ in range(n_steps):
        z = rng.standard_normal((2, size))
        dw = sq_dt * z[0]
        db = sq_dt * z[1]  # stock driver independent of the variance driver
        x_next, x_plus = _recip_cir_step(p, x, dt, dw)
        nu = 1.0 / np.maximum(x_plus, _RECIP_FLOOR)
        lr += drift_dt - 0.5 * alpha * alpha * nu * dt + alpha * np.sqrt(nu) * db
        x = x_next
    return lr


def _log_ratio_jump(p: JumpDiffusionParams, u, alpha, t, n_steps, rng, size):
    z = rng.standard_normal(size)
    counts = rng.poisson(p.lambda_j * t, size)
    total = int(counts.sum())
    per_path = np.zeros(size)
    if total > 0:
        ys = _sample_jump_factors(p.jump, rng, total)
        log_factors = np.log(alpha * (ys - 1.0) + 1.0)
        np.add.at(per_path, np.repeat(np.arange(size), counts), log_factors)
    drift = (alpha * p.mu + (1.0 - alpha) * p.r - 0.5 * alpha * alpha * p.sigma**2) * t
    return drift + alpha * p.sigma * math.sqrt(t) * z + per_path


def _log_ratio_vasicek(p: VasicekParams, u, alpha, t, n_steps, rng, size):
    dt = t / n_steps
    sq_dt = math.sqrt(dt)
    rho_c = math.sqrt(1.0 - p.rho * p.rho)
    decay = math.exp(-p.kappa * dt)
    innov_sd = p.delta * math.sqrt((1.0 - math.exp(-2.0 * p.kappa * dt)) / (2.0 * p.kappa))
    r_state = np.full(size, p.r0)
    rate_integral = np.zeros(size)
    stock_brownian = np.zeros(size)
    for _ in range(n_steps):
        z = rng.standard_normal((2, size))
        eta = z[0]
        r_next = p.gamma_level + (r_state - p.gamma_level) * decay + innov_sd * eta
        rate_integral += 0.5 * (r_state + r_next) * dt
        stock_brownian += (p.rho * eta + rho_c * z[1]) * sq_dt
        r_state = r_next
    return (
        alpha * p.mu * t
        - 0.5 * alpha * alpha * p.sigma * p.sigma * t
        + alpha * p.sigma * stock_brownian
        + (1.0 - alpha) * rate_integral
    )


_SIMULATORS = {
    GbmParams: _log_ratio_gbm,
    HestonParams: _log_ratio_heston,
    ThreeHalvesParams: _log_ratio_three_halves,
    JumpDiffusionParams: _log_ratio_jump,
    VasicekParams: _log_ratio_vasicek,
}

_DISCRETIZED = (HestonParams, ThreeHalvesParams, VasicekParams)


def _run_blocks(seed, n_paths, workers, block_fn):
    sizes = _block_sizes(n_paths)

    def one(idx):
        return block_fn(_block_rng(seed, idx), sizes[idx])

    if workers <= 1 or len(sizes) <= 1:
        blocks = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(one, range(len(sizes))))
    return np.concatenate(blocks)


def _check_finite(values, seed):
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NonFinitePath(
            f"path {int(bad[0])} produced a non-finite value (seed={seed})",
            path_index=int(bad[0]),
            seed=seed,
        )


def _mean_and_se(values):
    m = float(np.mean(values))
    if values.size > 1:
        var = float(np.var(values, ddof=1))
    else:
        var = 0.0
    return m, math.sqrt(var / values.size)


def mc_growth_estimate(
    model: ModelSpec,
    u: Utility,
    alpha: float,
    t: float,
    n_paths: int,
    n_steps: int,
    seed: int,
    workers: int = 1,
) -> SimEstimate:
    """Estimate (1/t) log E[(V_t/V_0)^theta] by path simulation.

    Lognormal and jump-diffusion wealth is sampled exactly; the Heston
    variance uses full-truncation Euler, the 3/2 variance is simulated
    through its reciprocal (a CIR process, again full truncation), and the
    OU rate uses its exact Gaussian transition with a trapezoidal rate
    integral. The standard error of the log-mean comes from the delta
    method.

    Identical arguments give a bit-identical estimate for any ``workers``.
    """
    alpha = float(_clamp_alpha(float(alpha)))
    t = float(t)
    n_paths = int(n_paths)
    n_steps = int(n_steps)
    seed = int(seed)
    if t <= 0.0:
        raise OutOfRange(f"t must be > 0, got {t}")
    if n_paths < 1 or n_steps < 1:
        raise OutOfRange("n_paths and n_steps must be positive")
    if isinstance(model, _DISCRETIZED) and n_steps < 10.0 * t:
        raise OutOfRange(
            f"discretized models need n_steps >= 10*t, got {n_steps} for t={t}"
        )
    sim = _SIMULATORS.get(type(model))
    if sim is None:
        raise OutOfRange(f"unsupported model type {type(model).__name__}")

    def block_fn(rng, size):
        lr = sim(model, u, alpha, t, n_steps, rng, size)
        with np.errstate(over="ignore"):  # overflow surfaces as NonFinitePath
            return np.exp(u.theta * lr)

    powers = _run_blocks(seed, n_paths, workers, block_fn)
    _check_finite(powers, seed)
    m, se_m = _mean_and_se(powers)
    if se_m == 0.0 and not (alpha == 0.0 and not isinstance(model, VasicekParams)):
        raise DegenerateVariance(
            "all simulated paths are identical; check the RNG configuration"
        )
    return SimEstimate(
        lambda_hat=math.log(m) / t,
        std_error=se_m / (m * t),
        horizon_t=t,
        n_paths=n_paths,
        n_steps=n_steps,
        seed=seed,
    )


def mc_laplace_three_halves(
    p: ThreeHalvesParams,
    lambda_l: float,
    t: float,
    n_paths: int,
    n_steps: int,
    seed: int,
    workers: int = 1,
) -> LaplaceEstimate:
    """Monte Carlo mean of exp(-lambda_l * integral of nu over [0, t])."""
    lambda_l = float(lambda_l)
    t = float(t)
    n_paths = int(n_paths)
    n_steps = int(n_steps)
    seed = int(seed)
    if lambda_l < 0.0:
        raise OutOfRange(f"lambda_l must be >= 0, got {lambda_l}")
    if t <= 0.0:
        raise OutOfRange(f"t must be > 0, got {t}")
    if n_paths < 1 or n_steps < 1:
        raise OutOfRange("n_paths and n_steps must be positive")

    dt = t / n_steps
    sq_dt = math.sqrt(dt)

    def block_fn(rng, size):
        x = np.full(size, 1.0 / p.nu0)
        nu_cur = np.full(size, p.nu0)
        integral = np.zeros(size)
        for _ in range(n_steps):
            dw = sq_dt * rng.standard_normal(size)
            x_next, _ = _recip_cir_step(p, x, dt, dw)
            nu_next = 1.0 / np.maximum(np.maximum(x_next, 0.0), _RECIP_FLOOR)
            integral += 0.5 * (nu_cur + nu_next) * dt
            x = x_next
            nu_cur = nu_next
        return np.exp(-lambda_l * integral)

    values = _run_blocks(seed, n_paths, workers, block_fn)
    _check_finite(values, seed)
    m, se_m = _mean_and_se(values)
    return LaplaceEstimate(
        mean=m,
        std_error=se_m,
        horizon_t=t,
        n_paths=n_paths,
        n_steps=n_steps,
        seed=seed,
    )
