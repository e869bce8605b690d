"""Acceptance suite: every release criterion, one test per criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or in
the failure report) and asserts the criterion at its stated tolerance.
"""

import json
import math
import time

import numpy as np
from scipy import integrate

import growthopt as go
from growthopt.cli import run as cli_run

from support import DRAWERS, draw_heston, draw_utility, draw_vasicek

U5 = go.Utility(0.5)

HESTON_REF = go.HestonParams(
    mu=0.08, kappa=2.0, gamma_level=0.04, delta=0.3, rho=-0.5, r=0.03, nu0=0.04
)
THREE_HALVES_REF = go.ThreeHalvesParams(
    mu=0.08, kappa=2.0, gamma_level=0.04, delta=0.5, r=0.03, nu0=0.04
)
VASICEK_REF = go.VasicekParams(
    mu=0.08, sigma=0.2, kappa=2.0, gamma_level=0.03, delta=0.01, rho=-0.3, r0=0.03
)
GBM_REF = go.GbmParams(mu=0.08, sigma=0.2, r=0.03)
JUMP_REF = go.JumpDiffusionParams(
    mu=0.08, sigma=0.2, lambda_j=1.0, jump=go.ExponentialJump(rate=2.0), r=0.03
)

SEED = 0x5EED


def report(number, name, ok, detail, started):
    elapsed = time.time() - started
    line = f"ACCEPTANCE {number:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail}; {elapsed:.1f}s)"
    print(line)
    assert ok, line


def test_01_bond_only_boundary_identity():
    started = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for name in ("gbm", "heston", "three_halves", "jump"):
        draw = DRAWERS[name]
        for _ in range(1000):
            model = draw(rng)
            u = draw_utility(rng)
            gap = abs(float(go.growth_rate(model, u, 0.0)) - u.theta * model.r)
            worst = max(worst, gap)
    report(1, "bond-only-identity", worst <= 1e-12, f"max |gap| = {worst:.2e}", started)


def test_02_vasicek_boundary_values():
    started = time.time()
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(1000):
        p = draw_vasicek(rng)
        u = draw_utility(rng)
        t = u.theta
        gap0 = abs(
            float(go.lambda_vasicek(p, u, 0.0))
            - (p.gamma_level * t + p.delta**2 * t**2 / (2.0 * p.kappa**2))
        )
        gap1 = abs(
            float(go.lambda_vasicek(p, u, 1.0))
            - (0.5 * (t * t - t) * p.sigma**2 + t * p.mu)
        )
        worst = max(worst, gap0, gap1)
    report(2, "vasicek-boundaries", worst <= 1e-12, f"max |gap| = {worst:.2e}", started)


def test_03_concavity_and_vasicek_quadratic():
    started = time.time()
    rng = np.random.default_rng(103)
    h = 1e-4
    grid = np.linspace(0.0, 1.0, 101)[1:-1]
    ok = True
    worst_second = -np.inf
    for name in ("heston", "three_halves", "jump"):
        draw = DRAWERS[name]
        for _ in range(200):
            model = draw(rng)
            u = draw_utility(rng)
            up = np.asarray(go.growth_rate(model, u, grid + h))
            mid = np.asarray(go.growth_rate(model, u, grid))
            down = np.asarray(go.growth_rate(model, u, grid - h))
            second = up - 2.0 * mid + down
            worst_second = max(worst_second, float(np.max(second)))
            ok = ok and bool(np.all(second < 0.0))
    worst_third = 0.0
    full = np.linspace(0.0, 1.0, 101)
    for _ in range(200):
        p = draw_vasicek(rng)
        u = draw_utility(rng)
        vals = np.asarray(go.lambda_vasicek(p, u, full))
        third = vals[3:] - 3.0 * vals[2:-1] + 3.0 * vals[1:-2] - vals[:-3]
        worst_third = max(worst_third, float(np.max(np.abs(third))))
    ok = ok and worst_third <= 1e-10
    report(
        3, "concavity",
        ok,
        f"max second diff = {worst_second:.2e}, max vasicek third diff = {worst_third:.2e}",
        started,
    )


def test_04_optimizer_agreement():
    started = time.time()
    worst_alpha = 0.0
    worst_value = 0.0
    for name, draw in DRAWERS.items():
        rng = np.random.default_rng(104)
        for _ in range(1000):
            model = draw(rng)
            u = draw_utility(rng)
            decision = go.optimal_allocation(model, u)
            numeric = go.numeric_argmax(model, u)
            worst_alpha = max(worst_alpha, abs(decision.alpha_star - numeric))
            shortfall = float(go.growth_rate(model, u, numeric)) - float(
                go.growth_rate(model, u, decision.alpha_star)
            )
            worst_value = max(worst_value, shortfall)
    ok = worst_alpha <= 1e-6 and worst_value <= 1e-10
    report(
        4, "optimizer-agreement", ok,
        f"max |alpha gap| = {worst_alpha:.2e}, max value shortfall = {worst_value:.2e}",
        started,
    )


def test_05_heston_coefficient_identity():
    started = time.time()
    rng = np.random.default_rng(105)
    worst = 0.0
    for _ in range(1000):
        p = draw_heston(rng)
        u = draw_utility(rng)
        c = go.heston_coefficients(p, u)
        lhs = c.c1 * c.c3 - c.c2**2
        rhs = p.kappa**6 * p.gamma_level**4 * (u.theta - u.theta**2) / p.delta**6
        worst = max(worst, abs(lhs - rhs) / rhs)
    report(5, "heston-identity", worst <= 1e-12, f"max rel gap = {worst:.2e}", started)


def test_06_riccati_convergence():
    started = time.time()
    rng = np.random.default_rng(106)
    worst_b = worst_slope = worst_lambda = 0.0
    for _ in range(50):
        p = draw_heston(rng)
        u = draw_utility(rng)
        alpha = 0.5
        trace_b = go.integrate_heston_riccati(p, u, alpha, 100.0, 1e-3)
        worst_b = max(
            worst_b, abs(float(trace_b.b_values[-1]) - trace_b.b_limit_closed_form)
        )
        trace_a = go.integrate_heston_riccati(p, u, alpha, 500.0, 1e-2)
        slope = float(trace_a.a_values[-1]) / 500.0
        worst_slope = max(worst_slope, abs(slope - trace_a.a_slope_closed_form))
        rebuilt = (
            slope
            - u.theta * alpha * p.rho * p.kappa * p.gamma_level / p.delta
            + u.theta * alpha * p.mu
            + u.theta * (1.0 - alpha) * p.r
        )
        worst_lambda = max(
            worst_lambda, abs(rebuilt - float(go.lambda_heston(p, u, alpha)))
        )
    ok = worst_b <= 1e-8 and worst_slope <= 1e-3 and worst_lambda <= 1e-3
    report(
        6, "riccati-convergence", ok,
        f"max B gap = {worst_b:.2e}, slope gap = {worst_slope:.2e}, "
        f"lambda gap = {worst_lambda:.2e}",
        started,
    )


def test_07_vasicek_ode():
    started = time.time()
    rng = np.random.default_rng(107)
    worst_b = worst_slope = worst_lambda = 0.0
    for _ in range(10):
        p = draw_vasicek(rng)
        u = draw_utility(rng)
        alpha = 0.5
        trace = go.integrate_vasicek_ode(p, u, alpha, 200.0, 1e-3)
        exact = trace.b_limit_closed_form + (
            trace.b_values[0] - trace.b_limit_closed_form
        ) * np.exp(-p.kappa * trace.times)
        worst_b = max(worst_b, float(np.max(np.abs(trace.b_values - exact))))
        slope = float(trace.a_values[-1]) / 200.0
        worst_slope = max(worst_slope, abs(slope - trace.a_slope_closed_form))
        rebuilt = (
            slope
            - u.theta * alpha * p.sigma * p.kappa * p.gamma_level * p.rho / p.delta
            + 0.5 * u.theta**2 * alpha**2 * p.sigma**2 * (1.0 - p.rho**2)
            + u.theta * alpha * p.mu
            - 0.5 * u.theta * alpha**2 * p.sigma**2
        )
        worst_lambda = max(
            worst_lambda, abs(rebuilt - float(go.lambda_vasicek(p, u, alpha)))
        )
    ok = worst_b <= 1e-10 and worst_slope <= 1e-3 and worst_lambda <= 1e-3
    report(
        7, "vasicek-ode", ok,
        f"max B gap = {worst_b:.2e}, slope gap = {worst_slope:.2e}, "
        f"lambda gap = {worst_lambda:.2e}",
        started,
    )


def test_08_monte_carlo_agreement():
    started = time.time()
    runs = [
        ("gbm", GBM_REF, 1.0, 20.0, 200_000, 1, None),
        ("heston", HESTON_REF, 0.5, 10.0, 100_000, 1000, 2e-3),
        ("three_halves", THREE_HALVES_REF, 0.5, 10.0, 100_000, 1000, 2e-3),
        ("vasicek", VASICEK_REF, 0.5, 10.0, 100_000, 1000, 2e-3),
        ("jump", JUMP_REF, 0.5, 20.0, 200_000, 1, 1e-3),
    ]
    details = []
    ok = True
    for name, model, alpha, t, paths, steps, allowance in runs:
        est = go.mc_growth_estimate(model, U5, alpha, t, paths, steps, SEED)
        closed = float(go.growth_rate(model, U5, alpha))
        gap = abs(est.lambda_hat - closed)
        if allowance is None:  # exact sampler: max(3 SE, 5e-3)
            tol = max(3.0 * est.std_error, 5e-3)
        else:
            tol = 3.0 * est.std_error + allowance
        ok = ok and gap <= tol
        details.append(f"{name} gap={gap:.2e} tol={tol:.2e}")
    report(8, "monte-carlo-agreement", ok, "; ".join(details), started)


def test_09_three_halves_transform():
    started = time.time()
    lambda_l = 0.125
    closed = go.laplace_three_halves_finite_t(THREE_HALVES_REF, lambda_l, 1.0)
    est = go.mc_laplace_three_halves(THREE_HALVES_REF, lambda_l, 1.0, 100_000, 2000, SEED)
    gap = abs(closed - est.mean)
    ok_mc = gap <= 3.0 * est.std_error

    d2 = THREE_HALVES_REF.delta**2
    c = 0.5 + THREE_HALVES_REF.kappa / d2
    a = math.sqrt(c * c + 2.0 * lambda_l / d2) - c
    limit = -a * THREE_HALVES_REF.kappa * THREE_HALVES_REF.gamma_level
    closed_long = go.laplace_three_halves_finite_t(THREE_HALVES_REF, lambda_l, 200.0)
    long_gap = abs(math.log(closed_long) / 200.0 - limit)
    ok = ok_mc and long_gap <= 1e-4
    report(
        9, "three-halves-transform", ok,
        f"mc gap = {gap:.2e} vs 3se = {3 * est.std_error:.2e}, long-t gap = {long_gap:.2e}",
        started,
    )


def test_10_exponential_jump_closed_form():
    started = time.time()
    worst = 0.0
    for alpha in np.linspace(0.05, 0.95, 10):
        for theta in np.linspace(0.05, 0.95, 10):
            u = go.Utility(float(theta))
            for rate in np.linspace(0.5, 5.0, 10):
                law = go.ExponentialJump(rate=float(rate))
                closed = go.jump_utility_moment(law, u, float(alpha))
                quad, _ = integrate.quad(
                    lambda y, a=alpha, th=theta, rj=rate: (a * y + 1.0 - a) ** th
                    * rj * math.exp(-rj * y),
                    0.0, np.inf, epsabs=1e-12, epsrel=1e-12,
                )
                worst = max(worst, abs(closed - quad) / abs(quad))
    report(10, "exponential-jump-closed-form", worst <= 1e-8,
           f"max rel gap = {worst:.2e}", started)


def test_11_degenerations():
    started = time.time()
    rng = np.random.default_rng(111)
    grid = np.linspace(0.0, 1.0, 101)

    worst_heston = 0.0
    for _ in range(20):
        kappa = rng.uniform(0.5, 3.0)
        gamma_level = rng.uniform(0.01, 0.3)
        mu, r = rng.uniform(-0.05, 0.15), rng.uniform(-0.02, 0.08)
        u = draw_utility(rng)
        heston = go.HestonParams(
            mu=mu, kappa=kappa, gamma_level=gamma_level, delta=1e-3, rho=0.0,
            r=r, nu0=gamma_level,
        )
        gbm = go.GbmParams(mu=mu, sigma=math.sqrt(gamma_level), r=r)
        gap = np.max(np.abs(
            np.asarray(go.lambda_heston(heston, u, grid))
            - np.asarray(go.lambda_gbm(gbm, u, grid))
        ))
        worst_heston = max(worst_heston, float(gap))

    jump_exact = True
    for _ in range(20):
        mu, sigma, r = rng.uniform(-0.05, 0.15), rng.uniform(0.05, 0.6), rng.uniform(-0.02, 0.08)
        lam = rng.uniform(0.1, 3.0)
        u = draw_utility(rng)
        jd = go.JumpDiffusionParams(mu=mu, sigma=sigma, lambda_j=lam,
                                    jump=go.ConstantJump(y=1.0), r=r)
        gbm = go.GbmParams(mu=mu, sigma=sigma, r=r)
        for a in grid[::10]:
            jump_exact = jump_exact and (
                go.lambda_jump(jd, u, float(a)) == go.lambda_gbm(gbm, u, float(a))
            )

    worst_vasicek = 0.0
    for _ in range(20):
        mu, sigma = rng.uniform(-0.05, 0.15), rng.uniform(0.05, 0.6)
        kappa = rng.uniform(0.3, 3.0)
        gamma_level = rng.uniform(-0.01, 0.08)
        u = draw_utility(rng)
        vas = go.VasicekParams(mu=mu, sigma=sigma, kappa=kappa, gamma_level=gamma_level,
                               delta=1e-6, rho=0.0, r0=0.05)
        gbm = go.GbmParams(mu=mu, sigma=sigma, r=gamma_level)
        gap = np.max(np.abs(
            np.asarray(go.lambda_vasicek(vas, u, grid))
            - np.asarray(go.lambda_gbm(gbm, u, grid))
        ))
        worst_vasicek = max(worst_vasicek, float(gap))

    ok = worst_heston <= 1e-5 and jump_exact and worst_vasicek <= 1e-9
    report(
        11, "degenerations", ok,
        f"heston sup = {worst_heston:.2e}, jump exact = {jump_exact}, "
        f"vasicek sup = {worst_vasicek:.2e}",
        started,
    )


def test_12_cli_determinism_across_workers(tmp_path):
    started = time.time()
    cfg = tmp_path / "heston.cfg"
    cfg.write_text(
        "model.kind = heston\nmodel.mu = 0.08\nmodel.kappa = 2.0\n"
        "model.gamma_level = 0.04\nmodel.delta = 0.3\nmodel.rho = -0.5\n"
        "model.r = 0.03\nmodel.nu0 = 0.04\nutility.theta = 0.5\n"
    )
    outputs = []
    for tag, workers in [("w1", 1), ("w2", 2), ("w8", 8), ("w1b", 1)]:
        out = tmp_path / f"mc_{tag}.json"
        code = cli_run([
            "verify-mc", "--config", str(cfg), "--t", "10", "--paths", "100000",
            "--steps", "1000", "--seed", str(SEED), "--workers", str(workers),
            "--out", str(out),
        ])
        assert code == 0
        outputs.append(out.read_bytes())
    identical = len(set(outputs)) == 1
    payload = json.loads(outputs[0])
    report(
        12, "cli-determinism", identical and payload["pass"] is True,
        f"identical JSON across workers 1/2/8 and reruns = {identical}",
        started,
    )
