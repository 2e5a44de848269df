"""Monte Carlo engine: sampled SINR, empirical outage and capacity.

Trials are independent work units. Trial ``i`` is generated from
``seeding.trial_key(master_seed, i)`` alone, so sequences are identical
for any chunk size, worker count or execution order.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, capacity, detectors, geometry, seeding
from .errors import InvalidParameter
from .geometry import Scenario

DEFAULT_TRIALS = 10_000
DEFAULT_OUTER = 2_000
DEFAULT_CHUNK = 2_048


class EmpiricalCdf:
    """Right-continuous empirical CDF ``#{x_i <= x} / N``."""

    def __init__(self, samples):
        self.samples = np.sort(np.asarray(samples, dtype=np.float64))
        if self.samples.size == 0:
            raise InvalidParameter("empirical CDF needs at least one sample")

    def __call__(self, x):
        r = np.searchsorted(self.samples, x, side="right") / self.samples.size
        return float(r) if np.ndim(r) == 0 else r

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class ComparisonReport:
    ks_distance: float
    mean_rel_err: float
    second_moment_rel_err: float
    n_trials: int


def ks_distance(samples, cdf) -> float:
    """Two-sided sup distance between the empirical CDF of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    F = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def _run_chunk(scenario, K, master_seed, start, n):
    keys = seeding.trial_keys(master_seed, start, n)
    return detectors.batch_sinr(detectors.build_batch(scenario, K, keys), scenario)


def sample_sinr(
    scenario: Scenario,
    K: int,
    n_trials: int,
    master_seed: int,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> np.ndarray:
    """Post-detection SINR of ``n_trials`` independent realizations.

    Uses ``scenario.detector``. Entry ``i`` equals
    ``detectors.detector_sinr(build_realization(scenario, K, trial_key(master_seed, i)), scenario)``
    up to floating-point rounding of the batched kernels.
    """
    if n_trials < 1:
        raise InvalidParameter(f"n_trials must be >= 1, got {n_trials}")
    if K < 0:
        raise InvalidParameter(f"K must be >= 0, got {K}")
    starts = list(range(0, n_trials, chunk_size))
    sizes = [min(chunk_size, n_trials - s) for s in starts]
    if workers <= 1 or len(starts) == 1:
        parts = [_run_chunk(scenario, K, master_seed, s, n) for s, n in zip(starts, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_chunk(scenario, K, master_seed, *a), zip(starts, sizes)))
    return np.concatenate(parts)


def empirical_outage(scenario: Scenario, K: int, n_trials: int, master_seed: int, **kw) -> float:
    """Fraction of sampled SINRs strictly below the threshold."""
    s = sample_sinr(scenario, K, n_trials, master_seed, **kw)
    return float(np.mean(s < scenario.sinr_th))


class OutageTable:
    """Per-K Monte Carlo outage, computed on demand and memoized.

    All K use the same master seed, so neighbouring K share their first
    interferers (common random numbers) and the table is smooth in K.
    """

    def __init__(self, scenario: Scenario, n_trials: int = DEFAULT_TRIALS, master_seed: int = 1, workers: int = 1):
        self.scenario = scenario
        self.n_trials = n_trials
        self.master_seed = master_seed
        self.workers = workers
        self._values: dict[int, float] = {}
        self._lock = threading.Lock()

    def __call__(self, K: int) -> float:
        K = int(K)
        with self._lock:
            if K in self._values:
                return self._values[K]
        v = empirical_outage(self.scenario, K, self.n_trials, self.master_seed, workers=self.workers)
        with self._lock:
            self._values[K] = v
        return v

    def known(self) -> dict:
        return dict(self._values)


def empirical_capacity(
    scenario: Scenario,
    rho0: float,
    n_outer: int = DEFAULT_OUTER,
    n_trials_per_K: int = DEFAULT_TRIALS,
    master_seed: int = 1,
    outage: OutageTable | None = None,
) -> float:
    """Capacity with the active-link count drawn at random ``n_outer`` times.

    Each draw ``N`` contributes ``N (1 - P_out(N - 1)) q`` with ``P_out``
    from the Monte Carlo outage table; the average is divided by the disc
    area. Pass ``outage`` to reuse a table across densities.
    """
    if rho0 < 0:
        raise InvalidParameter(f"density must be >= 0, got {rho0}")
    if rho0 == 0:
        return 0.0
    if outage is None:
        outage = OutageTable(scenario, n_trials_per_K, master_seed)
    outer_seed = int(seeding.substream(master_seed, seeding.OUTER)[0])
    counts = geometry.sample_active_counts(rho0, scenario, outer_seed, n_outer)
    q = capacity.rate_from_threshold(scenario.sinr_th_db)
    total = 0.0
    for n in counts:
        if n >= 1:
            total += n * (1.0 - outage(int(n) - 1)) * q
    return total / n_outer / scenario.area


def empirical_capacity_curve(scenario: Scenario, densities, outage: OutageTable) -> capacity.CapacityCurve:
    """Capacity curve with exact Poisson weights and Monte Carlo outage."""
    return capacity.capacity_curve(scenario, densities, outage=outage)


def empirical_optimal_density(scenario: Scenario, rho_min: float, rho_max: float, outage: OutageTable, **kw):
    return capacity.optimal_density(scenario, rho_min, rho_max, outage=outage, **kw)


def compare(scenario: Scenario, K: int, n_trials: int = DEFAULT_TRIALS, master_seed: int = 1, **kw) -> ComparisonReport:
    """Sampled MMSE SINR against the analytic Gamma model at fixed K."""
    mmse = scenario.with_(detector="mmse")
    s = sample_sinr(mmse, K, n_trials, master_seed, **kw)
    mo = analysis.sinr_moments(K, mmse)
    fit = analysis.gamma_fit(mo.mean, mo.variance)
    emp_mean = float(np.mean(s))
    emp_m2 = float(np.mean(s * s))
    return ComparisonReport(
        ks_distance=ks_distance(s, fit.cdf),
        mean_rel_err=abs(mo.mean - emp_mean) / emp_mean,
        second_moment_rel_err=abs(mo.second_moment - emp_m2) / emp_m2,
        n_trials=n_trials,
    )


def standard_error(samples) -> float:
    s = np.asarray(samples, dtype=np.float64)
    return float(np.std(s, ddof=1) / math.sqrt(s.size))
