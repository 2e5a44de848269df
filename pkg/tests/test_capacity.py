import math
import warnings

import numpy as np
import pytest

from mimocap import capacity
from mimocap.errors import BoundaryOptimumWarning, InvalidParameter, MultipleMaximaWarning
from mimocap.geometry import Scenario

SC = Scenario()


def test_rate():
    assert capacity.rate_from_threshold(10.0) == pytest.approx(math.log2(11.0))
    assert capacity.rate_from_threshold(0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("mean", [0.3, 4.0, 60.0, 400.0])
def test_poisson_support(mean):
    n, w = capacity.poisson_support(mean)
    assert 1 - w.sum() < capacity.TAIL_MASS
    assert n[0] == 0 and np.all(np.diff(n) == 1)
    assert capacity.poisson_support(0.0)[1].tolist() == [1.0]


def test_capacity_without_outage_is_linear():
    q = capacity.rate_from_threshold(SC.sinr_th_db)
    for rho in (0.01, 0.2, 1.0):
        c = capacity.network_capacity(rho, SC, outage=lambda K: 0.0)
        assert c == pytest.approx(rho * q, rel=1e-5)


def test_capacity_full_outage_is_zero():
    assert capacity.network_capacity(0.5, SC, outage=lambda K: 1.0) == 0.0
    assert capacity.network_capacity(0.0, SC) == 0.0
    with pytest.raises(InvalidParameter):
        capacity.network_capacity(-0.1, SC)


def test_conditional_capacity():
    q = capacity.rate_from_threshold(10.0)
    assert capacity.conditional_capacity(4, SC, outage=lambda K: 0.25) == pytest.approx(5 * 0.75 * q)


def test_optimum_synthetic():
    rho, c = capacity.optimal_density(SC, 0.01, 10.0, capacity=lambda r: r * math.exp(-r / 0.5))
    assert rho == pytest.approx(0.5, rel=1e-3)
    assert c == pytest.approx(0.5 / math.e, rel=1e-6)


def test_optimum_boundary_warning():
    with pytest.warns(BoundaryOptimumWarning):
        rho, _ = capacity.optimal_density(SC, 0.01, 1.0, capacity=lambda r: r)
    assert rho == pytest.approx(1.0)


def test_multiple_maxima_warning():
    f = lambda r: math.exp(-((math.log(r) + 2) ** 2)) + math.exp(-((math.log(r) - 1) ** 2))  # noqa: E731
    with pytest.warns(MultipleMaximaWarning):
        capacity.optimal_density(SC, 0.01, 10.0, capacity=f)


def test_analytic_curve_interior_maximum():
    grid = np.geomspace(0.02, 3.0, 30)
    curve = capacity.capacity_curve(SC, grid)
    assert capacity.local_maxima(curve.capacities) == 1
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rho, c = capacity.optimal_density(SC, 0.02, 3.0)
    assert c >= curve.optimum[1]
    assert grid[0] < rho < grid[-1]


def test_transmission_probability():
    assert capacity.transmission_probability(0.3, 0.6) == (0.5, False)
    assert capacity.transmission_probability(0.3, 0.2) == (1.0, True)
    with pytest.raises(InvalidParameter):
        capacity.transmission_probability(0.3, 0.0)


def test_local_maxima():
    assert capacity.local_maxima([1, 2, 1, 2, 1]) == 2
    assert capacity.local_maxima([1, 2]) == 0
