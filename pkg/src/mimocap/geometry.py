"""Spatial model: interferers on an annulus around the tagged receiver.

Interferers are uniform over the disc of radius ``R`` minus a guard disc of
radius ``eps``. Channels are isotropic, so only the distance matters; the
received power of an interferer at distance ``c`` is
``(c0 / c)**theta * snr`` with noise normalized to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import seeding
from .errors import InvalidParameter

DETECTORS = ("mmse", "zf", "partial-csi")


@dataclass(frozen=True)
class Scenario:
    """Physical and network parameters of one evaluation.

    Distances are in units of the tagged link length by default
    (``c0 = 1``); ``snr_db`` fixes ``alpha0 * p0 = 10**(snr_db/10)``.
    Defaults are the 4-antenna, 20 dB, R = 3 configuration.
    """

    m: int = 4
    c0: float = 1.0
    R: float = 3.0
    eps: float = 0.1
    theta: float = 4.0
    snr_db: float = 20.0
    sinr_th_db: float = 10.0
    detector: str = "mmse"
    csi_range: float = 2.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameter(f"m must be a positive integer, got {self.m}")
        if not 0 < self.eps < self.c0 <= self.R:
            raise InvalidParameter(
                f"need 0 < eps < c0 <= R, got eps={self.eps}, c0={self.c0}, R={self.R}"
            )
        if self.theta < 2:
            raise InvalidParameter(f"path-loss exponent must be >= 2, got {self.theta}")
        if self.detector not in DETECTORS:
            raise InvalidParameter(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        if self.csi_range < 0:
            raise InvalidParameter("csi_range must be nonnegative")

    @property
    def snr(self) -> float:
        """Received tagged power ``alpha0 * p0`` in linear units."""
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def sinr_th(self) -> float:
        return 10.0 ** (self.sinr_th_db / 10.0)

    @property
    def area(self) -> float:
        return math.pi * self.R**2

    def power_bounds(self):
        """Smallest and largest possible interferer power."""
        return (self.c0 / self.R) ** self.theta * self.snr, (self.c0 / self.eps) ** self.theta * self.snr

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class InterfererSet:
    distances: np.ndarray
    powers: np.ndarray

    @property
    def K(self) -> int:
        return len(self.distances)


def distances_from_uniforms(u, scenario: Scenario):
    """Inverse CDF of the annulus distance law, ``sqrt(eps^2 + u (R^2 - eps^2))``."""
    e2 = scenario.eps**2
    return np.sqrt(e2 + np.asarray(u) * (scenario.R**2 - e2))


def sample_distances(K: int, scenario: Scenario, seed: int) -> np.ndarray:
    if K < 0:
        raise InvalidParameter(f"K must be >= 0, got {K}")
    if K == 0:
        return np.empty(0)
    u = seeding.uniforms(seeding.substream(seed, seeding.DISTANCE), K)[0]
    return distances_from_uniforms(u, scenario)


def distance_cdf(x, scenario: Scenario):
    e2 = scenario.eps**2
    x = np.clip(np.asarray(x, dtype=np.float64), scenario.eps, scenario.R)
    return (x**2 - e2) / (scenario.R**2 - e2)


def powers_from_distances(c, scenario: Scenario):
    return (scenario.c0 / np.asarray(c)) ** scenario.theta * scenario.snr


def received_power(ck: float, scenario: Scenario) -> float:
    """Noise-normalized received power of an interferer at distance ``ck``."""
    if not scenario.eps <= ck <= scenario.R:
        raise InvalidParameter(f"distance {ck} outside [{scenario.eps}, {scenario.R}]")
    return float(powers_from_distances(ck, scenario))


def sample_interferers(K: int, scenario: Scenario, seed: int) -> InterfererSet:
    d = sample_distances(K, scenario, seed)
    return InterfererSet(d, powers_from_distances(d, scenario))


def interference_power_density(x, scenario: Scenario):
    """Density of an interferer's received power; zero outside its support.

    For general ``theta`` this is
    ``2 snr^(2/theta) c0^2 / (theta (R^2 - eps^2) x^((theta+2)/theta))``.
    """
    x = np.asarray(x, dtype=np.float64)
    lo, hi = scenario.power_bounds()
    th = scenario.theta
    with np.errstate(divide="ignore", invalid="ignore"):
        f = (
            2.0 * scenario.snr ** (2.0 / th) * scenario.c0**2
            / (th * (scenario.R**2 - scenario.eps**2) * x ** ((th + 2.0) / th))
        )
    return np.where((x >= lo) & (x <= hi), f, 0.0)


def interference_power_density_theta4(x, scenario: Scenario):
    """``sqrt(snr) c0^2 / (2 (R^2 - eps^2) x^(3/2))`` on the support (theta = 4 only)."""
    x = np.asarray(x, dtype=np.float64)
    lo = (scenario.c0 / scenario.R) ** 4 * scenario.snr
    hi = (scenario.c0 / scenario.eps) ** 4 * scenario.snr
    with np.errstate(divide="ignore", invalid="ignore"):
        f = math.sqrt(scenario.snr) * scenario.c0**2 / (2.0 * (scenario.R**2 - scenario.eps**2) * x**1.5)
    return np.where((x >= lo) & (x <= hi), f, 0.0)


def mean_active_links(rho0: float, scenario: Scenario) -> float:
    return rho0 * scenario.area


def sample_active_count(rho0: float, scenario: Scenario, seed: int) -> int:
    """Total number of active links (tagged one included) in the disc.

    Poisson with mean ``rho0 * pi * R^2``, drawn by inverse CDF from the
    counter stream so that it is a pure function of ``seed``.
    """
    if rho0 < 0:
        raise InvalidParameter(f"density must be >= 0, got {rho0}")
    if rho0 == 0:
        return 0
    u = seeding.uniforms(seeding.substream(seed, seeding.COUNT), 1)[0, 0]
    return int(stats.poisson.ppf(u, mean_active_links(rho0, scenario)))


def sample_active_counts(rho0: float, scenario: Scenario, master_seed: int, n: int) -> np.ndarray:
    """``n`` independent active-link counts; entry ``i`` equals
    ``sample_active_count(rho0, scenario, trial_key(master_seed, i))``."""
    if rho0 < 0:
        raise InvalidParameter(f"density must be >= 0, got {rho0}")
    if rho0 == 0:
        return np.zeros(n, dtype=np.int64)
    keys = seeding.substream(seeding.trial_keys(master_seed, 0, n), seeding.COUNT)
    u = seeding.uniforms(keys, 1)[:, 0]
    return stats.poisson.ppf(u, mean_active_links(rho0, scenario)).astype(np.int64)
