"""Complex Gaussian channels and statistics of their dominant singular mode.

The tagged link transmits on the dominant right singular vector of its
channel, so the received signal strength is governed by the largest
squared singular value ``lambda1**2`` of an m x m matrix with i.i.d.
unit-variance complex Gaussian entries. This module provides

* channel sampling and dominant-mode extraction,
* the first two moments of ``lambda1**2`` (Monte Carlo, cached on disk, or
  exact via the Khatri determinant form of its CDF),
* entry moments of a uniformly distributed unit vector in C^m.
"""

from __future__ import annotations

import logging
import math
import os
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate, special

from . import seeding
from .errors import InvalidParameter, UnsupportedMoment

log = logging.getLogger(__name__)

DEFAULT_MOMENT_SAMPLES = 1_000_000
DEFAULT_MOMENT_SEED = 20080318
_CHUNK = 50_000


@dataclass(frozen=True)
class DominantMode:
    """Largest singular value with its unit left/right singular vectors."""

    lambda1: float
    u1: np.ndarray
    v1: np.ndarray


@dataclass(frozen=True)
class LambdaMoments:
    m: int
    moment1: float
    moment2: float
    method: str
    samples: int = 0


def sample_channel(m: int, seed: int) -> np.ndarray:
    """Draw an m x m channel with i.i.d. CN(0, 1) entries.

    The matrix is a pure function of ``seed``; it is the same draw used for
    the tagged link of ``detectors.build_realization`` with that seed.
    """
    if m < 1:
        raise InvalidParameter(f"antenna count must be >= 1, got {m}")
    key = seeding.substream(seed, seeding.CHANNEL)
    return seeding.complex_normals(key, m * m)[0].reshape(m, m)


def _fix_phase(u, v):
    # make the first nonzero entry of u real nonnegative; rotate v alike so H v = lambda u
    idx = np.argmax(np.abs(u) > 0)
    ph = u[idx] / abs(u[idx]) if u[idx] != 0 else 1.0
    return u / ph, v / ph


def dominant_mode(H) -> DominantMode:
    """Largest singular value and singular vectors of a square matrix."""
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidParameter(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidParameter("matrix has non-finite entries")
    U, s, Vh = np.linalg.svd(H)
    u, v = _fix_phase(U[:, 0], np.conj(Vh[0]))
    return DominantMode(float(s[0]), u, v)


def dominant_modes(H):
    """Batched :func:`dominant_mode` for an (n, m, m) stack.

    Returns ``(lambda1, u1)`` with shapes (n,) and (n, m); the phase
    convention matches the single-matrix version.
    """
    U, s, _ = np.linalg.svd(H)
    u = U[:, :, 0]
    first = np.argmax(np.abs(u) > 0, axis=1)
    lead = u[np.arange(u.shape[0]), first]
    mag = np.abs(lead)
    ph = np.where(mag > 0, lead / np.where(mag > 0, mag, 1.0), 1.0)
    return s[:, 0], u / ph[:, None]


def sphere_entry_moments(m: int):
    """``(E|u_i|^2, E|u_i|^4, E|u_i|^2|u_j|^2)`` for u uniform on the unit sphere of C^m.

    The cross moment is undefined for m = 1 and returned as 0.
    """
    if m < 1:
        raise InvalidParameter(f"antenna count must be >= 1, got {m}")
    cross = 1.0 / (m * (m + 1)) if m >= 2 else 0.0
    return 1.0 / m, 2.0 / (m * (m + 1)), cross


# ---------------------------------------------------------------------------
# exact distribution of lambda1**2 (square case n = m)


def lambda_cdf(x, m: int):
    """CDF of the largest eigenvalue of ``H H^*`` for an m x m CN(0,1) matrix.

    Khatri's form: ``det[gamma(i + j - 1, x)] / prod_k ((k-1)!)^2`` with the
    lower incomplete gamma function, i, j = 1..m.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    idx = np.arange(1, m + 1)
    order = idx[:, None] + idx[None, :] - 1
    # scale row i by 1/(i-1)! and column j by 1/(j-1)! so entries stay O(1)
    scale = special.gammaln(order) - special.gammaln(idx)[:, None] - special.gammaln(idx)[None, :]
    mats = special.gammainc(order[None], x[:, None, None]) * np.exp(scale)[None]
    out = np.linalg.det(mats)
    out = np.where(x > 0, out, 0.0)
    return np.clip(out, 0.0, 1.0)


def _exact_moment(m: int, tau: int) -> float:
    # E[X^tau] = int tau x^(tau-1) (1 - F(x)) dx
    def f(x):
        return tau * x ** (tau - 1) * (1.0 - lambda_cdf(x, m)[0])

    upper = 4.0 * m + 60.0
    val, _ = integrate.quad(f, 0.0, upper, limit=400, epsabs=1e-10, epsrel=1e-11)
    return val


# ---------------------------------------------------------------------------
# Monte Carlo moments with a small on-disk cache

_cache_lock = threading.Lock()
_memory_cache: dict[tuple[int, int, int, int], float] = {}


def cache_path() -> Path:
    root = os.environ.get("MIMOCAP_CACHE_DIR")
    base = Path(root) if root else Path.home() / ".cache" / "mimocap"
    return base / "lambda_moments.csv"


def _read_cache(path: Path) -> dict:
    out = {}
    try:
        with open(path) as fh:
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) != 5:
                    continue
                try:
                    m, tau, samples, seed = (int(p) for p in parts[:4])
                    out[(m, tau, samples, seed)] = float(parts[4])
                except ValueError:
                    continue
    except OSError:
        pass
    return out


def _write_cache(path: Path, records) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a") as fh:
            for (m, tau, samples, seed), value in records:
                fh.write(f"{m},{tau},{samples},{seed},{float(value)!r}\n")
    except OSError as exc:
        log.debug("moment cache not writable: %s", exc)


def _mc_moments(m: int, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    s1 = 0.0
    s2 = 0.0
    done = 0
    while done < samples:
        n = min(_CHUNK, samples - done)
        H = (rng.standard_normal((n, m, m)) + 1j * rng.standard_normal((n, m, m))) / math.sqrt(2.0)
        lam = np.linalg.eigvalsh(H @ np.conj(np.swapaxes(H, 1, 2)))[:, -1]
        s1 += lam.sum()
        s2 += (lam * lam).sum()
        done += n
    return float(s1 / samples), float(s2 / samples)


def lambda_moments(
    m: int,
    tau: int,
    samples: int = DEFAULT_MOMENT_SAMPLES,
    seed: int = DEFAULT_MOMENT_SEED,
    method: str = "monte-carlo",
) -> float:
    """``E[(lambda1**2)**tau]`` for an m x m CN(0, 1) matrix, tau in {1, 2}.

    ``method="monte-carlo"`` estimates both moments from ``samples`` draws
    (deterministic in ``seed``) and caches them in memory and in
    :func:`cache_path`. ``method="exact"`` integrates the Khatri CDF.
    """
    if tau not in (1, 2):
        raise UnsupportedMoment(f"only tau in {{1, 2}} is supported, got {tau}")
    if m < 1:
        raise InvalidParameter(f"antenna count must be >= 1, got {m}")
    if m == 1:
        # |h|^2 ~ Exp(1)
        return float(math.factorial(tau))
    if method == "exact":
        return _exact_moment(m, tau)
    if method != "monte-carlo":
        raise InvalidParameter(f"unknown moment method {method!r}")
    if samples < 10_000:
        raise InvalidParameter("monte-carlo moments need at least 10^4 samples")

    key = (m, tau, samples, seed)
    with _cache_lock:
        if key in _memory_cache:
            return _memory_cache[key]
        path = cache_path()
        disk = _read_cache(path)
        if key in disk:
            _memory_cache.update(disk)
            return disk[key]
    e1, e2 = _mc_moments(m, samples, seed)
    records = [((m, 1, samples, seed), e1), ((m, 2, samples, seed), e2)]
    with _cache_lock:
        _memory_cache.update(records)
        _write_cache(cache_path(), records)
    return e1 if tau == 1 else e2


def lambda_moment_pair(m: int, **kwargs) -> LambdaMoments:
    method = kwargs.get("method", "monte-carlo")
    samples = kwargs.get("samples", DEFAULT_MOMENT_SAMPLES) if method == "monte-carlo" else 0
    return LambdaMoments(
        m=m,
        moment1=lambda_moments(m, 1, **kwargs),
        moment2=lambda_moments(m, 2, **kwargs),
        method=method,
        samples=samples,
    )


def clear_memory_cache() -> None:
    with _cache_lock:
        _memory_cache.clear()
