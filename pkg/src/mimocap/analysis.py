"""Closed-form SINR statistics of the MMSE receiver.

The mean and variance of the post-detection SINR follow from the
eta-transform of the interference Gram matrix ``G~_{-1} G~_{-1}^*``, which
the large-system limit ties to the eta-transform of the (scaled)
interferer power law through a scalar fixed point. The SINR is then
modelled as Gamma distributed with matching first two moments, and the
outage probability is that Gamma CDF at the decoding threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from . import randmat
from .errors import ApproximationBreakdown, InvalidParameter
from .geometry import Scenario

BISECT_LO = 1e-12
BISECT_MAXITER = 200
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class EtaSolution:
    gamma: float
    eta: float
    eta_prime: float
    K: int
    residual: float


@dataclass(frozen=True)
class SinrMoments:
    K: int
    mean: float
    variance: float

    @property
    def second_moment(self) -> float:
        return self.mean**2 + self.variance


@dataclass(frozen=True)
class GammaFit:
    a: float  # shape
    b: float  # scale

    @property
    def mean(self) -> float:
        return self.a * self.b

    @property
    def variance(self) -> float:
        return self.a * self.b**2

    def cdf(self, x):
        return gamma_cdf(x, self)

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore"):
            logp = (self.a - 1) * np.log(x) - x / self.b - self.a * math.log(self.b) - special.gammaln(self.a)
        return np.where(x > 0, np.exp(logp), 0.0)


# ---------------------------------------------------------------------------
# eta-transform of m * (interferer power)


def _scaled_arg(x, scenario: Scenario):
    return scenario.c0**2 * np.sqrt(scenario.m * scenario.snr * x)


def _eta_mp_theta4(x, scenario: Scenario):
    s = _scaled_arg(x, scenario)
    span = scenario.R**2 - scenario.eps**2
    return 1.0 - s / span * (np.arctan(s / scenario.eps**2) - np.arctan(s / scenario.R**2))


def _eta_mp_theta4_deriv(x, scenario: Scenario):
    span = scenario.R**2 - scenario.eps**2
    e2, r2 = scenario.eps**2, scenario.R**2
    if x == 0:
        # limit of phi'(s) * s / (2x) as x -> 0
        return -scenario.c0**4 * scenario.m * scenario.snr * (1.0 / e2 - 1.0 / r2) / span
    s = _scaled_arg(x, scenario)
    dphi = np.arctan(s / e2) - np.arctan(s / r2) + s * (e2 / (e2**2 + s**2) - r2 / (r2**2 + s**2))
    return -dphi * s / (2.0 * x) / span


def _quad_over_distance(fn, scenario: Scenario):
    # expectation over the annulus distance law; integrate in t = c^2 (uniform)
    lo, hi = scenario.eps**2, scenario.R**2
    th = scenario.theta

    def power(t):
        return scenario.snr * (scenario.c0**2 / t) ** (th / 2.0)

    val, _ = integrate.quad(
        lambda t: fn(power(t)), lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200,
        points=[min(max(scenario.c0**2, lo), hi)],
    )
    return val / (hi - lo)


def eta_mp(gamma: float, scenario: Scenario) -> float:
    """``E[1 / (1 + gamma * m * p)]`` with ``p`` an interferer's received power.

    Closed form for ``theta = 4``; adaptive quadrature otherwise.
    """
    if gamma < 0:
        raise InvalidParameter(f"gamma must be >= 0, got {gamma}")
    if gamma == 0:
        return 1.0
    if scenario.theta == 4:
        return float(_eta_mp_theta4(gamma, scenario))
    m = scenario.m
    return _quad_over_distance(lambda p: 1.0 / (1.0 + gamma * m * p), scenario)


def eta_mp_derivative(x: float, scenario: Scenario) -> float:
    """``d eta_mp / d x``."""
    if x < 0:
        raise InvalidParameter(f"argument must be >= 0, got {x}")
    if scenario.theta == 4:
        return float(_eta_mp_theta4_deriv(x, scenario))
    m = scenario.m
    return _quad_over_distance(lambda p: -m * p / (1.0 + x * m * p) ** 2, scenario)


def eta_mp_quadrature(gamma: float, scenario: Scenario) -> float:
    """Quadrature of ``E[1/(1 + gamma m p)]`` against the power density itself.

    Independent of the closed form; used as its oracle.
    """
    from .geometry import interference_power_density

    lo, hi = scenario.power_bounds()
    m = scenario.m

    def f(x):
        return interference_power_density(x, scenario) / (1.0 + gamma * m * x)

    # split geometrically; the density spans several decades
    edges = np.geomspace(lo, hi, 9)
    return float(sum(integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0] for a, b in zip(edges[:-1], edges[1:])))


# ---------------------------------------------------------------------------
# fixed point for eta of the interference Gram matrix


def _fixed_point_residual(eta, gamma, beta, scenario, eta_fn):
    return eta - 1.0 + beta * (1.0 - eta_fn(gamma * eta, scenario))


def _bisect_eta(gamma, K, scenario, eta_fn=eta_mp):
    beta = K / scenario.m
    lo, hi = BISECT_LO, 1.0
    # F(lo) < 0 < F(hi) for K > 0: F is increasing in eta
    for _ in range(BISECT_MAXITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _fixed_point_residual(mid, gamma, beta, scenario, eta_fn) > 0:
            hi = mid
        else:
            lo = mid
    rlo = abs(_fixed_point_residual(lo, gamma, beta, scenario, eta_fn))
    rhi = abs(_fixed_point_residual(hi, gamma, beta, scenario, eta_fn))
    return (lo, rlo) if rlo <= rhi else (hi, rhi)


def solve_eta(gamma: float, K: int, scenario: Scenario, eta_fn=None) -> EtaSolution:
    """Solve ``1 - eta = (K/m) (1 - eta_mp(gamma * eta))`` and its gamma-derivative.

    ``eta_prime`` is exact by implicit differentiation of the fixed point.
    ``eta_fn`` replaces :func:`eta_mp` (test hook for negative controls).
    """
    if K < 0:
        raise InvalidParameter(f"K must be >= 0, got {K}")
    if gamma <= 0:
        raise InvalidParameter(f"gamma must be > 0, got {gamma}")
    if K == 0:
        return EtaSolution(gamma, 1.0, 0.0, 0, 0.0)
    if eta_fn is None:
        eta_fn = eta_mp
    eta, res = _bisect_eta(gamma, K, scenario, eta_fn)
    if res > RESIDUAL_TOL:
        raise ApproximationBreakdown(f"fixed point residual {res:.3g} above {RESIDUAL_TOL:g}")
    beta = K / scenario.m
    dmp = eta_mp_derivative(gamma * eta, scenario)
    eta_prime = beta * eta * dmp / (1.0 - beta * gamma * dmp)
    return EtaSolution(gamma, eta, eta_prime, K, res)


def eta_prime_fd(gamma: float, K: int, scenario: Scenario, rel_step: float = 1e-4, eta_fn=None) -> float:
    """Central finite difference of the fixed-point eta in gamma."""
    h = rel_step * gamma
    hi = solve_eta(gamma + h, K, scenario, eta_fn=eta_fn).eta
    lo = solve_eta(gamma - h, K, scenario, eta_fn=eta_fn).eta
    return (hi - lo) / (2 * h)


# ---------------------------------------------------------------------------
# SINR moments, Gamma fit, outage


def _lambda_pair(m):
    return randmat.lambda_moments(m, 1), randmat.lambda_moments(m, 2)


def sinr_mean(K: int, scenario: Scenario) -> float:
    """``snr * E[lambda1^2] * eta(1)``."""
    e1, _ = _lambda_pair(scenario.m)
    return float(scenario.snr * e1 * solve_eta(1.0, K, scenario).eta)


def sinr_variance(K: int, scenario: Scenario) -> float:
    """``snr^2 * Var(lambda1^2) * (eta(1) + eta'(1))``."""
    e1, e2 = _lambda_pair(scenario.m)
    sol = solve_eta(1.0, K, scenario)
    factor = sol.eta + sol.eta_prime
    if factor <= 0:
        raise ApproximationBreakdown(
            f"eta(1) + eta'(1) = {factor:.3g} <= 0 at K={K}, m={scenario.m}"
        )
    return float(scenario.snr**2 * (e2 - e1**2) * factor)


def sinr_moments(K: int, scenario: Scenario) -> SinrMoments:
    return SinrMoments(K, sinr_mean(K, scenario), sinr_variance(K, scenario))


def gamma_fit(mean: float, variance: float) -> GammaFit:
    if not (mean > 0 and variance > 0):
        raise InvalidParameter(f"mean and variance must be positive, got {mean}, {variance}")
    return GammaFit(mean * mean / variance, variance / mean)


def gamma_cdf(x, fit: GammaFit):
    """Regularized lower incomplete gamma ``P(a, x / b)``."""
    x = np.asarray(x, dtype=np.float64)
    out = special.gammainc(fit.a, np.maximum(x, 0.0) / fit.b)
    return float(out) if out.ndim == 0 else out


def sinr_gamma_fit(K: int, scenario: Scenario) -> GammaFit:
    mo = sinr_moments(K, scenario)
    return gamma_fit(mo.mean, mo.variance)


@lru_cache(maxsize=65536)
def _outage_cached(K: int, scenario: Scenario) -> float:
    return gamma_cdf(scenario.sinr_th, sinr_gamma_fit(K, scenario))


def outage_probability(K: int, scenario: Scenario) -> float:
    """Probability that the Gamma-modelled SINR falls below the threshold."""
    if scenario.sinr_th == 0:
        return 0.0
    return _outage_cached(int(K), scenario)
