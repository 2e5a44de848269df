"""Acceptance criteria, one test per criterion, at the stated tolerances.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line; the lines are
repeated in the terminal summary (see conftest.py). Run directly with
``python3 tests/test_acceptance.py`` to get only the report.
"""

import time

import numpy as np
import pytest

from mimocap import analysis, capacity, cli, detectors, montecarlo, randmat, seeding
from mimocap.geometry import Scenario

REPORT = []

BASE = Scenario()  # m=4, 20 dB, R=3, eps=0.1, c0=1, theta=4, 10 dB threshold
MC_TRIALS = 10_000
MC_SEED = 1
RHO_MIN, RHO_MAX = 0.02, 3.0


def report(n, title, passed, detail):
    line = f"ACCEPTANCE {n:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    REPORT.append(line)
    print(line)
    return passed


def _random_pd(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X @ np.conj(X.T) + 0.1 * np.eye(n)


# ---------------------------------------------------------------------------
# shared expensive results


_analytic_opt = {}
_mc_opt = {}


def analytic_optimum(m):
    if m not in _analytic_opt:
        _analytic_opt[m] = capacity.optimal_density(BASE.with_(m=m), RHO_MIN, RHO_MAX)
    return _analytic_opt[m]


def mc_optimum(detector):
    if detector not in _mc_opt:
        sc = BASE.with_(detector=detector)
        table = montecarlo.OutageTable(sc, MC_TRIALS, MC_SEED)
        _mc_opt[detector] = capacity.optimal_density(sc, RHO_MIN, RHO_MAX, outage=table)
    return _mc_opt[detector]


# ---------------------------------------------------------------------------


def test_01_schur_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        A = _random_pd(rng, int(rng.integers(2, 13)))
        direct = np.linalg.inv(A)[0, 0].real
        worst = max(worst, abs(detectors.schur_inverse_entry(A) - direct) / abs(direct))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 5
    assert report(1, "Schur oracle", ok, f"max rel err {worst:.2e} (<= 1e-10), {dt:.2f} s (< 5 s)")


def test_02_mmse_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    n = 0
    for m in (2, 4, 6):
        for K in (0, 1, 5, 20):
            for i in range(84):  # 3 * 4 * 84 = 1008 realizations
                r = detectors.build_realization(BASE.with_(m=m), K, 10_000 * m + 100 * K + i)
                a, b = detectors.mmse_sinr(r), detectors.mmse_sinr_schur(r)
                worst = max(worst, abs(a - b) / b)
                n += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 30 and n >= 1000
    assert report(2, "MMSE equivalence", ok, f"{n} draws, max rel err {worst:.2e} (<= 1e-8), {dt:.2f} s (< 30 s)")


def test_03_eta_closed_form():
    t0 = time.perf_counter()
    gam = np.geomspace(1e-4, 1e3, 50)
    err = max(abs(analysis.eta_mp(g, BASE) - analysis.eta_mp_quadrature(g, BASE)) for g in gam)
    dt = time.perf_counter() - t0
    ok = err <= 1e-8 and dt < 5
    assert report(3, "eta closed form vs quadrature", ok, f"max abs err {err:.2e} (<= 1e-8), {dt:.2f} s (< 5 s)")


def _empirical_eta(sc, K, n, seed):
    b = detectors.build_batch(sc, K, seeding.trial_keys(seed, 0, n))
    G = b.channels * np.sqrt(b.powers)[:, None, :]
    ev = np.maximum(np.linalg.eigvalsh(G @ np.conj(np.swapaxes(G, 1, 2))), 0.0)
    return float(np.mean(np.sum(1.0 / (1.0 + ev), axis=1) / sc.m))


def test_04_eta_fixed_point_vs_empirical():
    parts, ok = [], True
    for K in (2, 20):
        eta = analysis.solve_eta(1.0, K, BASE).eta
        emp = _empirical_eta(BASE, K, 10_000, 7)
        rel = abs(eta - emp) / emp
        ok &= rel <= 0.05
        parts.append(f"K={K} eta={eta:.4g} emp={emp:.4g} rel {rel:.3f}")
    assert report(4, "eta fixed point vs empirical (<= 5%)", ok, "; ".join(parts))


def test_05_sinr_distribution_ks():
    t0 = time.perf_counter()
    parts, ok = [], True
    for K in (2, 20):
        rep = montecarlo.compare(BASE, K, MC_TRIALS, MC_SEED)
        ok &= rep.ks_distance <= 0.06
        parts.append(f"K={K} KS {rep.ks_distance:.3f}")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    assert report(5, "SINR CDF KS distance (<= 0.06)", ok, "; ".join(parts) + f"; {dt:.1f} s")


def test_06_moments():
    bad, worst_mean, worst_m2 = [], 0.0, 0.0
    for m in (2, 4, 6):
        for K in (2, 5, 10, 20):
            rep = montecarlo.compare(BASE.with_(m=m), K, MC_TRIALS, MC_SEED)
            worst_mean = max(worst_mean, rep.mean_rel_err)
            worst_m2 = max(worst_m2, rep.second_moment_rel_err)
            if rep.mean_rel_err > 0.10 or rep.second_moment_rel_err > 0.15:
                bad.append(f"m={m},K={K}({rep.mean_rel_err:.2f}/{rep.second_moment_rel_err:.2f})")
    detail = f"worst mean err {worst_mean:.3f} (<= 0.10), worst m2 err {worst_m2:.3f} (<= 0.15)"
    if bad:
        detail += "; failing " + " ".join(bad)
    assert report(6, "SINR moments vs Monte Carlo", not bad, detail)


def test_07_capacity_peaks():
    t0 = time.perf_counter()
    target = {2: 0.25, 4: 0.78, 6: 1.53}
    parts, ok = [], True
    for m, ref in target.items():
        sc = BASE.with_(m=m)
        grid = np.geomspace(RHO_MIN, RHO_MAX, 48)
        caps = np.array([capacity.network_capacity(r, sc) for r in grid])
        interior = 0 < int(np.argmax(caps)) < grid.size - 1
        rho, c = analytic_optimum(m)
        within = abs(c - ref) <= 0.2 * ref
        ok &= within and interior
        parts.append(f"m={m} peak {c:.3f} at rho {rho:.3f} (target {ref} +-20%, interior={interior})")
    dt = time.perf_counter() - t0
    ok &= dt < 300
    assert report(7, "analytic capacity peaks", ok, "; ".join(parts) + f"; {dt:.1f} s")


def test_08_per_antenna_peak_monotone():
    per = [analytic_optimum(m)[1] / m for m in (2, 4, 6)]
    ok = per[0] < per[1] < per[2]
    assert report(8, "peak/m increasing in m", ok, ", ".join(f"{p:.4f}" for p in per))


def test_09_optimal_density_trend():
    rho = [analytic_optimum(m)[0] for m in (2, 4, 6)]
    rho_mc, _ = mc_optimum("mmse")
    rel = abs(rho[1] - rho_mc) / rho_mc
    ok = rho[0] < rho[1] < rho[2] and rel <= 0.25
    detail = f"rho* = {', '.join(f'{r:.3f}' for r in rho)}; m=4 analytic {rho[1]:.3f} vs MC {rho_mc:.3f} (rel {rel:.3f} <= 0.25)"
    assert report(9, "optimal density trend", ok, detail)


def test_10_partial_csi_ratio():
    _, full = mc_optimum("mmse")
    _, part = mc_optimum("partial-csi")
    ratio = part / full
    ok = 0.79 <= ratio <= 0.99
    assert report(10, "partial/full CSI peak ratio in [0.79, 0.99]", ok, f"{part:.3f}/{full:.3f} = {ratio:.3f}")


def test_11_zf_receiver():
    rho_m, c_m = mc_optimum("mmse")
    rho_z, c_z = mc_optimum("zf")
    ok = c_z <= 0.70 * c_m and rho_z <= rho_m
    detail = f"peak ratio {c_z / c_m:.3f} (<= 0.70), rho* zf {rho_z:.3f} <= mmse {rho_m:.3f}"
    assert report(11, "ZF vs MMSE", ok, detail)


def test_12_per_draw_dominance():
    sc = BASE.with_(m=4)
    worst, n = -np.inf, 0
    for K in (2, 5, 10, 20):
        b = detectors.build_batch(sc, K, seeding.trial_keys(12, 0, 2500))
        mm = detectors.batch_mmse_sinr(b)
        other = np.maximum(detectors.batch_zf_sinr(b), detectors.batch_partial_csi_sinr(b, sc.csi_range))
        worst = max(worst, float(np.max((other - mm) / mm)))
        n += mm.size
    ok = worst <= 1e-9
    assert report(12, "per-draw MMSE dominance", ok, f"{n} draws, max relative excess {worst:.2e} (<= 1e-9)")


def test_13_sphere_moments():
    rng = np.random.default_rng(13)
    worst = 0.0
    for m in (2, 4, 6):
        z = rng.standard_normal((1_000_000, m)) + 1j * rng.standard_normal((1_000_000, m))
        u2 = np.abs(z / np.linalg.norm(z, axis=1, keepdims=True)) ** 2
        ref = randmat.sphere_entry_moments(m)
        expected = (1 / m, 2 / (m * (m + 1)), 1 / (m * (m + 1)))
        assert np.allclose(ref, expected, rtol=1e-15)
        for s, r in zip((u2[:, 0], u2[:, 0] ** 2, u2[:, 0] * u2[:, 1]), ref):
            worst = max(worst, abs(s.mean() - r) / montecarlo.standard_error(s))
    ok = worst <= 3.0
    assert report(13, "sphere entry moments", ok, f"max deviation {worst:.2f} standard errors (<= 3)")


DETERMINISM_RUNS = {
    "sinr-cdf": ["--trials", "2000"],
    "moments": ["--trials", "2000", "--set", "K=0,2,10"],
    "capacity-sweep": ["--trials", "1000", "--set", "rho_points=8", "--set", "K=2"],
    "optimal-density": ["--trials", "1000", "--set", "L=0.2", "--set", "detector=mmse,zf"],
    "validate": [],
}


def test_14_determinism(tmp_path):
    same = []
    for cmd, extra in DETERMINISM_RUNS.items():
        outs = []
        for i in range(2):
            path = tmp_path / f"{cmd}-{i}.csv"
            code = cli.main([cmd, "--seed", "5", "--out", str(path), *extra])
            assert code == 0
            outs.append(path.read_bytes())
        same.append(outs[0] == outs[1])
    ok = all(same)
    detail = ", ".join(f"{c}={'same' if s else 'DIFF'}" for c, s in zip(DETERMINISM_RUNS, same))
    assert report(14, "byte-identical reruns", ok, detail)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
