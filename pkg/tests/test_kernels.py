"""Compiled kernels against the pure-numpy fallback."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mimocap import _backend, _fallback

_kernels = pytest.importorskip("mimocap._kernels")

seeds = st.integers(min_value=0, max_value=2**64 - 1)


def test_backend_selected():
    assert _backend.name in ("cython", "python")
    assert _backend.kernels in (_fallback, _kernels)


@settings(max_examples=50, deadline=None)
@given(st.lists(seeds, min_size=1, max_size=8), st.integers(0, 50), st.integers(1, 40))
def test_uniforms_bit_identical(keys, start, count):
    k = np.array(keys, dtype=np.uint64)
    a = _fallback.uniforms(k, start, count)
    b = _kernels.uniforms(k, start, count)
    assert np.array_equal(a, b)
    assert np.all((a > 0) & (a < 1))


@settings(max_examples=50, deadline=None)
@given(st.lists(seeds, min_size=1, max_size=8), st.integers(0, 20), st.integers(1, 30))
def test_complex_normals_agree(keys, start, count):
    k = np.array(keys, dtype=np.uint64)
    a = _fallback.complex_normals(k, start, count)
    b = _kernels.complex_normals(k, start, count)
    np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-15)


def test_mix64_identical():
    z = np.arange(1000, dtype=np.uint64) * np.uint64(0x9E3779B97F4A7C15)
    assert np.array_equal(_fallback.mix64(z), np.asarray(_kernels.mix64(z)))


def _system(rng, n, m, K):
    g0 = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    h = rng.standard_normal((n, m, K)) + 1j * rng.standard_normal((n, m, K))
    p = 10.0 ** rng.uniform(-2, 6, (n, K))
    noise = rng.uniform(1, 100, n)
    return g0, h, p, noise


@pytest.mark.parametrize("m,K", [(1, 0), (2, 1), (4, 3), (4, 20), (6, 50)])
def test_mmse_solve_agree(m, K):
    rng = np.random.default_rng(m * 100 + K)
    g0, h, p, noise = _system(rng, 64, m, K)
    a = _fallback.mmse_solve(g0, h, p, noise)
    b = _kernels.mmse_solve(g0, h, p, noise)
    np.testing.assert_allclose(b, a, rtol=1e-9)
    # residual of the compiled solve
    cov = (h * p[:, None, :]) @ np.conj(np.swapaxes(h, 1, 2)) + noise[:, None, None] * np.eye(m)
    res = np.einsum("nij,nj->ni", cov, b) - g0
    assert np.max(np.abs(res)) <= 1e-8 * np.max(np.abs(cov))


@pytest.mark.parametrize("m,K", [(2, 0), (4, 5), (6, 30)])
def test_filter_sinr_agree(m, K):
    rng = np.random.default_rng(7 + m + K)
    g0, h, p, _ = _system(rng, 64, m, K)
    w = rng.standard_normal((64, m)) + 1j * rng.standard_normal((64, m))
    np.testing.assert_allclose(_kernels.filter_sinr(w, g0, h, p), _fallback.filter_sinr(w, g0, h, p), rtol=1e-12)


def test_pure_python_switch(monkeypatch):
    import importlib

    monkeypatch.setenv("MIMOCAP_PURE_PYTHON", "1")
    mod = importlib.reload(_backend)
    try:
        assert mod.name == "python" and mod.kernels is _fallback
    finally:
        monkeypatch.delenv("MIMOCAP_PURE_PYTHON")
        importlib.reload(_backend)


def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    assert bench.main(["--trials", "200", "--repeat", "1"]) == 0
    assert "sample_sinr mmse" in capsys.readouterr().out
