import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mimocap import detectors, seeding
from mimocap.errors import InvalidParameter
from mimocap.geometry import Scenario

SC = Scenario()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32))
def test_schur_matches_inverse(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = X @ np.conj(X.T) + 0.5 * np.eye(n)
    direct = np.linalg.inv(A)[0, 0].real
    assert abs(detectors.schur_inverse_entry(A) - direct) <= 1e-10 * abs(direct)


def test_schur_rejects_bad_input():
    with pytest.raises(InvalidParameter):
        detectors.schur_inverse_entry(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidParameter):
        detectors.schur_inverse_entry(np.array([[1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(InvalidParameter):
        detectors.schur_inverse_entry(np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([1, 2, 4, 6]), st.integers(0, 25), st.integers(0, 2**40))
def test_mmse_two_routes_agree(m, K, seed):
    r = detectors.build_realization(SC.with_(m=m), K, seed)
    a, b = detectors.mmse_sinr(r), detectors.mmse_sinr_schur(r)
    assert abs(a - b) <= 1e-8 * b


def test_mmse_no_interference():
    r = detectors.build_realization(SC, 0, 5)
    expected = SC.snr * r.tagged.lambda1**2
    assert detectors.mmse_sinr(r) == pytest.approx(expected, rel=1e-12)
    assert detectors.zf_sinr(r) == pytest.approx(expected, rel=1e-12)


def test_mmse_filter_achieves_mmse_sinr():
    for seed in range(20):
        r = detectors.build_realization(SC, 6, seed)
        assert detectors.realized_sinr(detectors.mmse_filter(r), r) == pytest.approx(detectors.mmse_sinr(r), rel=1e-9)


def test_sinr_decreases_with_more_interferers():
    r = detectors.build_realization(SC, 30, 3)
    vals = [detectors.mmse_sinr(r.with_interferers(k)) for k in range(31)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))
    assert r.with_interferers(7).K == 7


def test_zf_nulls_strongest():
    r = detectors.build_realization(SC, 10, 8)
    w = detectors.zf_filter(r)
    idx = detectors.strongest(r.powers, r.m - 1)
    leak = np.abs(np.conj(w) @ r.channels[:, idx])
    assert np.max(leak) < 1e-10 * np.linalg.norm(w) * np.max(np.linalg.norm(r.channels, axis=0))
    assert abs(np.vdot(w, r.tagged.u1)) > 0


def test_partial_csi_limits():
    r = detectors.build_realization(SC, 12, 4)
    full = SC.with_(detector="partial-csi", csi_range=10.0)
    assert detectors.partial_csi_sinr(r, full) == pytest.approx(detectors.mmse_sinr(r), rel=1e-9)
    none = SC.with_(detector="partial-csi", csi_range=0.0)
    mrc = detectors.realized_sinr(r.tagged.u1, r)
    assert detectors.partial_csi_sinr(r, none) == pytest.approx(mrc, rel=1e-12)


def test_dominance_per_draw():
    for seed in range(300):
        r = detectors.build_realization(SC, 20, seed)
        best = detectors.mmse_sinr(r)
        assert detectors.zf_sinr(r) <= best * (1 + 1e-9)
        assert detectors.partial_csi_sinr(r, SC) <= best * (1 + 1e-9)


def test_realized_sinr_zero_filter():
    r = detectors.build_realization(SC, 2, 1)
    with pytest.raises(InvalidParameter):
        detectors.realized_sinr(np.zeros(4), r)


def test_build_realization_rejects_negative_k():
    with pytest.raises(InvalidParameter):
        detectors.build_realization(SC, -1, 1)


@pytest.mark.parametrize("detector", ["mmse", "zf", "partial-csi"])
@pytest.mark.parametrize("m,K", [(2, 0), (2, 5), (4, 3), (4, 20), (6, 10)])
def test_batch_matches_scalar(detector, m, K):
    sc = SC.with_(m=m, detector=detector)
    keys = seeding.trial_keys(17, 0, 40)
    batch = detectors.batch_sinr(detectors.build_batch(sc, K, keys), sc)
    scalar = np.array([detectors.detector_sinr(detectors.build_realization(sc, K, int(k)), sc) for k in keys])
    np.testing.assert_allclose(batch, scalar, rtol=1e-9)
