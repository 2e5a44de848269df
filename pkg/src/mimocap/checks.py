"""Oracle and invariant checks behind ``mimocap validate``.

Each check compares an implementation against an independent route
(direct inversion, quadrature, finite differences, Monte Carlo) and
reports the measured discrepancy with its bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from . import analysis, capacity, detectors, montecarlo, randmat
from .config import RunConfig


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    bound: float
    passed: bool


def _le(name, value, bound):
    value = float(value)
    return CheckResult(name, value, bound, bool(value <= bound))


def _random_pd(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X @ np.conj(X.T) + 0.1 * np.eye(n)


def check_schur(n_mats=200, seed=11):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_mats):
        A = _random_pd(rng, int(rng.integers(2, 13)))
        direct = np.linalg.inv(A)[0, 0].real
        worst = max(worst, abs(detectors.schur_inverse_entry(A) - direct) / abs(direct))
    return _le("schur_inverse_entry vs direct inverse (rel)", worst, 1e-10)


def check_mmse_equivalence(scenario, n=200, seed=12):
    worst = 0.0
    for i in range(n):
        for m in (2, 4, 6):
            r = detectors.build_realization(scenario.with_(m=m), (0, 1, 5, 20)[i % 4], seed * 100_003 + i)
            a, b = detectors.mmse_sinr(r), detectors.mmse_sinr_schur(r)
            worst = max(worst, abs(a - b) / b)
    return _le("mmse_sinr vs mmse_sinr_schur (rel)", worst, 1e-8)


def check_eta_closed_form(scenario, eta_fn):
    gam = np.geomspace(1e-4, 1e3, 50)
    err = max(abs(eta_fn(g, scenario) - analysis.eta_mp_quadrature(g, scenario)) for g in gam)
    return _le("eta_mp closed form vs quadrature (abs)", err, 1e-8)


def check_eta_derivative(scenario, eta_fn):
    worst = 0.0
    for K in range(1, 51):
        sol = analysis.solve_eta(1.0, K, scenario, eta_fn=eta_fn)
        fd = analysis.eta_prime_fd(1.0, K, scenario, eta_fn=eta_fn)
        worst = max(worst, abs(fd - sol.eta_prime) / abs(sol.eta_prime))
    return _le("eta'(1) implicit vs finite difference (rel)", worst, 1e-4)


def check_gamma_fit(seed=13):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        mean, var = rng.uniform(0.1, 1e3), rng.uniform(0.1, 1e5)
        f = analysis.gamma_fit(mean, var)
        worst = max(worst, abs(f.a * f.b - mean) / mean, abs(f.a * f.b**2 - var) / var)
    return _le("gamma fit reconstruction (rel)", worst, 1e-12)


def check_sphere_moments(n=1_000_000, seed=14):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in (2, 4, 6):
        z = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        u2 = np.abs(z / np.linalg.norm(z, axis=1, keepdims=True)) ** 2
        samples = (u2[:, 0], u2[:, 0] ** 2, u2[:, 0] * u2[:, 1])
        for s, ref in zip(samples, randmat.sphere_entry_moments(m)):
            worst = max(worst, abs(s.mean() - ref) / montecarlo.standard_error(s))
    return _le("sphere entry moments (standard errors)", worst, 3.0)


def check_dominance(scenario, n=1000, seed=15):
    worst = 0.0
    sc = scenario.with_(m=4)
    for i in range(n):
        r = detectors.build_realization(sc, 20, seed * 100_003 + i)
        best = detectors.mmse_sinr(r)
        other = max(detectors.zf_sinr(r), detectors.partial_csi_sinr(r, sc))
        worst = max(worst, (other - best) / best)
    return _le("max(zf, partial) over mmse, per draw (rel excess)", worst, 1e-9)


def check_determinism(scenario, seed):
    a = montecarlo.sample_sinr(scenario, 10, 3000, seed, chunk_size=3000)
    b = montecarlo.sample_sinr(scenario, 10, 3000, seed, chunk_size=257, workers=4)
    return _le("sample_sinr chunking/threads mismatches", int(np.sum(a != b)), 0)


def check_poisson_mass():
    worst = 0.0
    for k0 in (0.5, 5.0, 50.0, 200.0):
        _, w = capacity.poisson_support(k0)
        worst = max(worst, 1.0 - w.sum())
    return _le("neglected Poisson mass", worst, 1e-6)


def check_lambda_moments():
    worst = 0.0
    for m in (2, 4):
        for tau in (1, 2):
            mc = randmat.lambda_moments(m, tau)
            ex = randmat.lambda_moments(m, tau, method="exact")
            worst = max(worst, abs(mc - ex) / ex)
    return _le("lambda moments monte-carlo vs exact (rel)", worst, 5e-3)


def run_all(cfg: RunConfig):
    """Run every check for the first configured antenna count."""
    scenario = cfg.scenario(cfg.m[0])
    eta_fn = analysis.eta_mp
    if cfg.corrupt_eta:
        def eta_fn(x, sc):  # noqa: F811 - deliberate negative control
            return 1.05 * analysis.eta_mp(x, sc)
    checks = [
        check_schur,
        partial(check_mmse_equivalence, scenario),
        partial(check_eta_closed_form, scenario, eta_fn),
        partial(check_eta_derivative, scenario, eta_fn),
        check_gamma_fit,
        check_sphere_moments,
        partial(check_dominance, scenario),
        partial(check_determinism, scenario, cfg.seed),
        check_poisson_mass,
        check_lambda_moments,
    ]
    return [c() for c in checks]
