"""Compiled kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--trials N] [--repeat R]

Times each kernel on Monte Carlo sized inputs, then a full ``sample_sinr``
run with each backend swapped in.
"""

import argparse
import timeit

import numpy as np

from mimocap import _backend, _fallback, montecarlo, seeding
from mimocap.geometry import Scenario

try:
    from mimocap import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases(n, m, K):
    rng = np.random.default_rng(0)
    keys = seeding.trial_keys(1, 0, n)
    g0 = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    h = rng.standard_normal((n, m, K)) + 1j * rng.standard_normal((n, m, K))
    p = 10.0 ** rng.uniform(-2, 6, (n, K))
    noise = np.ones(n)
    w = _fallback.mmse_solve(g0, h, p, noise)
    return {
        "uniforms": lambda k: k.uniforms(keys, 0, m * K),
        "complex_normals": lambda k: k.complex_normals(keys, 0, m * K),
        "mmse_solve": lambda k: k.mmse_solve(g0, h, p, noise),
        "filter_sinr": lambda k: k.filter_sinr(w, g0, h, p),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("-m", type=int, default=4)
    ap.add_argument("-K", type=int, default=20)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return 1

    print(f"n={args.trials} m={args.m} K={args.K}, best of {args.repeat}")
    print(f"{'kernel':<22}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn in kernel_cases(args.trials, args.m, args.K).items():
        tp = best_of(lambda: fn(_fallback), args.repeat)
        tc = best_of(lambda: fn(_kernels), args.repeat)
        print(f"{name:<22}{tp * 1e3:>12.2f}{tc * 1e3:>12.2f}{tp / tc:>10.2f}")

    saved = _backend.kernels
    try:
        for det in ("mmse", "zf", "partial-csi"):
            sc = Scenario(m=args.m, detector=det)
            times = []
            for k in (_fallback, _kernels):
                _backend.kernels = k
                times.append(best_of(lambda: montecarlo.sample_sinr(sc, args.K, args.trials, 1), args.repeat))
            tp, tc = times
            print(f"{'sample_sinr ' + det:<22}{tp * 1e3:>12.2f}{tc * 1e3:>12.2f}{tp / tc:>10.2f}")
    finally:
        _backend.kernels = saved
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
