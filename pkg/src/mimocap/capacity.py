"""Link-layer throughput capacity and the capacity-maximizing link density.

Each link sends at ``q = log2(1 + SINR_th)`` and succeeds with probability
``1 - P_out(K)`` when ``K`` other links are active. The total active-link
count in the disc is Poisson with mean ``rho0 * pi * R^2``; capacity per
unit area averages ``N (1 - P_out(N - 1)) q`` over that count.

Outage can come from the analytic Gamma model (default) or from any
callable ``K -> P_out`` such as a Monte Carlo outage table.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize, stats

from . import analysis
from .errors import BoundaryOptimumWarning, InvalidParameter, MultipleMaximaWarning
from .geometry import Scenario

TAIL_MASS = 1e-6
MIN_GRID = 40

OutageFn = Callable[[int], float]


@dataclass(frozen=True)
class CapacityCurve:
    densities: np.ndarray
    capacities: np.ndarray
    optimum: tuple  # (rho_star, c_star)


def rate_from_threshold(sinr_th_db: float) -> float:
    """Spectral efficiency ``log2(1 + 10**(sinr_th_db / 10))`` in bps/Hz."""
    return math.log2(1.0 + 10.0 ** (sinr_th_db / 10.0))


def _outage_fn(scenario: Scenario, outage: Optional[OutageFn]) -> OutageFn:
    if outage is not None:
        return outage
    return lambda K: analysis.outage_probability(K, scenario)


def conditional_capacity(K: int, scenario: Scenario, outage: Optional[OutageFn] = None) -> float:
    """Sum throughput ``(K + 1)(1 - P_out(K)) q`` of K+1 simultaneously active links."""
    p_out = _outage_fn(scenario, outage)(K)
    return (K + 1) * (1.0 - p_out) * rate_from_threshold(scenario.sinr_th_db)


def poisson_support(mean_links: float, tail: float = TAIL_MASS):
    """Active-link counts ``0..N_max`` and their Poisson weights.

    ``N_max`` is the smallest count whose upper tail ``P(N > N_max)`` is
    below ``tail``.
    """
    if mean_links <= 0:
        return np.array([0]), np.array([1.0])
    nmax = int(stats.poisson.isf(tail, mean_links)) + 1
    while stats.poisson.sf(nmax, mean_links) >= tail:
        nmax += 1
    n = np.arange(nmax + 1)
    return n, stats.poisson.pmf(n, mean_links)


def network_capacity(rho0: float, scenario: Scenario, outage: Optional[OutageFn] = None) -> float:
    """Link-layer throughput capacity in bps/Hz per unit area at density ``rho0``."""
    if rho0 < 0:
        raise InvalidParameter(f"density must be >= 0, got {rho0}")
    if rho0 == 0:
        return 0.0
    fn = _outage_fn(scenario, outage)
    q = rate_from_threshold(scenario.sinr_th_db)
    counts, w = poisson_support(rho0 * scenario.area)
    total = 0.0
    for n, wn in zip(counts[1:], w[1:]):
        total += n * (1.0 - fn(int(n) - 1)) * q * wn
    return total / scenario.area


def capacity_curve(
    scenario: Scenario, densities, outage: Optional[OutageFn] = None
) -> CapacityCurve:
    rho = np.asarray(densities, dtype=np.float64)
    caps = np.array([network_capacity(r, scenario, outage) for r in rho])
    i = int(np.argmax(caps))
    return CapacityCurve(rho, caps, (float(rho[i]), float(caps[i])))


def local_maxima(values) -> int:
    """Number of strict interior local maxima of a sequence."""
    v = np.asarray(values)
    if v.size < 3:
        return 0
    return int(np.sum((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])))


def optimal_density(
    scenario: Scenario,
    rho_min: float,
    rho_max: float,
    *,
    outage: Optional[OutageFn] = None,
    capacity: Optional[Callable[[float], float]] = None,
    n_grid: int = 48,
    rtol: float = 1e-3,
):
    """Maximize capacity over ``[rho_min, rho_max]``.

    Geometric grid scan followed by golden-section refinement between the
    best grid point's neighbours. Returns ``(rho_star, c_star)``; warns with
    :class:`BoundaryOptimumWarning` when the best point is an endpoint and
    with :class:`MultipleMaximaWarning` when the grid is not unimodal.
    ``capacity`` overrides the capacity function entirely.
    """
    if not 0 < rho_min < rho_max:
        raise InvalidParameter(f"need 0 < rho_min < rho_max, got {rho_min}, {rho_max}")
    if capacity is None:

        def capacity(r):
            return network_capacity(r, scenario, outage)

    grid = np.geomspace(rho_min, rho_max, max(n_grid, MIN_GRID))
    vals = np.array([capacity(r) for r in grid])
    i = int(np.argmax(vals))
    if local_maxima(vals) > 1:
        warnings.warn("capacity grid has several local maxima", MultipleMaximaWarning, stacklevel=2)
    if i == 0 or i == grid.size - 1:
        warnings.warn(
            f"capacity optimum at search boundary rho={grid[i]:.6g}", BoundaryOptimumWarning, stacklevel=2
        )
        return float(grid[i]), float(vals[i])
    try:
        res = optimize.minimize_scalar(
            lambda r: -capacity(r), bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden", tol=rtol / 2
        )
    except ValueError:  # flat bracket
        return float(grid[i]), float(vals[i])
    if -res.fun >= vals[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(vals[i])


def transmission_probability(rho_star: float, total_density: float):
    """Per-link transmission probability ``rho* / L`` capped at one.

    Returns ``(p_t, saturated)``.
    """
    if total_density <= 0:
        raise InvalidParameter("total link density must be positive")
    p = rho_star / total_density
    return (1.0, True) if p > 1.0 else (p, False)
