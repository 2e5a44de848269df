import numpy as np
import pytest

from mimocap import capacity, detectors, montecarlo, randmat, seeding
from mimocap.errors import InvalidParameter
from mimocap.geometry import Scenario

SC = Scenario()


@pytest.mark.parametrize("detector", ["mmse", "zf", "partial-csi"])
def test_chunking_and_threads_do_not_change_results(detector):
    sc = SC.with_(detector=detector)
    a = montecarlo.sample_sinr(sc, 8, 1500, 21, chunk_size=1500)
    b = montecarlo.sample_sinr(sc, 8, 1500, 21, chunk_size=97, workers=3)
    c = montecarlo.sample_sinr(sc, 8, 1500, 21, chunk_size=512, workers=1)
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_trial_is_reproducible_in_isolation():
    s = montecarlo.sample_sinr(SC, 5, 300, 8)
    for i in (0, 123, 299):
        r = detectors.build_realization(SC, 5, seeding.trial_key(8, i))
        assert s[i] == pytest.approx(detectors.mmse_sinr(r), rel=1e-9)


def test_no_interference_mean():
    s = montecarlo.sample_sinr(SC, 0, 20_000, 3)
    ref = SC.snr * randmat.lambda_moments(4, 1, method="exact")
    assert abs(s.mean() - ref) < 3 * montecarlo.standard_error(s)


def test_empirical_cdf_and_ks():
    cdf = montecarlo.EmpiricalCdf([3.0, 1.0, 2.0])
    assert cdf(0.5) == 0.0 and cdf(1.0) == pytest.approx(1 / 3) and cdf(3.0) == 1.0
    assert len(cdf) == 3
    with pytest.raises(InvalidParameter):
        montecarlo.EmpiricalCdf([])
    u = (np.arange(1000) + 0.5) / 1000
    assert montecarlo.ks_distance(u, lambda x: x) == pytest.approx(0.0005)


def test_sample_errors():
    with pytest.raises(InvalidParameter):
        montecarlo.sample_sinr(SC, 2, 0, 1)
    with pytest.raises(InvalidParameter):
        montecarlo.sample_sinr(SC, -1, 10, 1)


def test_outage_table_memoizes():
    t = montecarlo.OutageTable(SC, 500, 2)
    v = t(4)
    assert t.known() == {4: v}
    assert t(4) == v
    assert v == montecarlo.empirical_outage(SC, 4, 500, 2)


def test_empirical_capacity_close_to_exact_weights():
    t = montecarlo.OutageTable(SC, 1000, 2)
    exact = capacity.network_capacity(0.3, SC, outage=t)
    drawn = montecarlo.empirical_capacity(SC, 0.3, n_outer=4000, master_seed=2, outage=t)
    assert drawn == pytest.approx(exact, rel=0.05)
    assert montecarlo.empirical_capacity(SC, 0.0) == 0.0


def test_compare_report_fields():
    rep = montecarlo.compare(SC, 2, 2000, 1)
    assert 0 <= rep.ks_distance <= 1 and rep.n_trials == 2000
    assert rep.mean_rel_err >= 0 and rep.second_moment_rel_err >= 0
