"""Equivalent channels and post-detection SINR of linear receivers.

After MRT every link reduces to a single stream. The tagged receiver sees

    y = sqrt(snr) * lambda1 * u1 * b0 + sum_k sqrt(p_k) * h_k * b_k + n

with ``h_k`` i.i.d. CN(0, I_m). The functions below evaluate the SINR of the
tagged stream for MMSE (two independent routes), zero-forcing and an MMSE
receiver that only knows the channels of nearby interferers.

Two layers share one random layout: :func:`build_realization` returns one
:class:`NetworkRealization` for the scalar reference functions, and
:func:`build_batch` draws many trials at once for the Monte Carlo engine.
Trial ``i`` of ``build_batch(scenario, K, keys)`` is exactly
``build_realization(scenario, K, keys[i])``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend, geometry, randmat, seeding
from .errors import InvalidParameter, NumericFailure
from .geometry import Scenario

COND_LIMIT = 1e14


@dataclass(frozen=True)
class NetworkRealization:
    snr: float
    tagged: randmat.DominantMode
    channels: np.ndarray  # (m, K) columns h_k
    powers: np.ndarray  # (K,)
    distances: np.ndarray  # (K,)

    @property
    def m(self) -> int:
        return self.tagged.u1.shape[0]

    @property
    def K(self) -> int:
        return self.powers.shape[0]

    @property
    def signal(self) -> np.ndarray:
        """Tagged column ``sqrt(snr) * lambda1 * u1``."""
        return np.sqrt(self.snr) * self.tagged.lambda1 * self.tagged.u1

    def gtilde(self) -> np.ndarray:
        """Power-weighted equivalent channel, shape (m, K+1), tagged column first."""
        return np.column_stack([self.signal, self.channels * np.sqrt(self.powers)[None, :]])

    def with_interferers(self, n: int) -> "NetworkRealization":
        """Same realization keeping only the first ``n`` interferers."""
        return NetworkRealization(
            self.snr, self.tagged, self.channels[:, :n], self.powers[:n], self.distances[:n]
        )


def _interferer_vectors(keys, m, K):
    z = seeding.complex_normals(seeding.substream(keys, seeding.INTERFERER), m * K)
    return np.swapaxes(z.reshape(-1, K, m), 1, 2)


def build_realization(scenario: Scenario, K: int, seed: int) -> NetworkRealization:
    """Draw the tagged dominant mode and ``K`` interferers from ``seed``.

    Increasing ``K`` only appends interferers: the first ``K`` are the same
    for every larger ``K``.
    """
    if K < 0:
        raise InvalidParameter(f"K must be >= 0, got {K}")
    m = scenario.m
    mode = randmat.dominant_mode(randmat.sample_channel(m, seed))
    d = geometry.sample_distances(K, scenario, seed)
    h = _interferer_vectors(seed, m, K)[0] if K else np.empty((m, 0), dtype=np.complex128)
    return NetworkRealization(scenario.snr, mode, h, geometry.powers_from_distances(d, scenario), d)


# ---------------------------------------------------------------------------
# scalar reference receivers


def _guard(A):
    c = np.linalg.cond(A)
    if not np.isfinite(c) or c > COND_LIMIT:
        raise NumericFailure(f"matrix condition number {c:.3g} exceeds {COND_LIMIT:g}")


def mmse_sinr(r: NetworkRealization) -> float:
    """MMSE SINR as ``1 / [(I + G~^* G~)^{-1}]_{11} - 1``.

    Evaluated through ``y = A^{-1} e1`` and the identity
    ``1 - y_1 = y^* (G~^* G~) e1``, which is the same quantity without the
    cancellation of subtracting one from a number close to one.
    """
    G = r.gtilde()
    gram = np.conj(G.T) @ G
    A = np.eye(gram.shape[0]) + gram
    _guard(A)
    e1 = np.zeros(A.shape[0])
    e1[0] = 1.0
    y = np.linalg.solve(A, e1)
    num = np.vdot(y, gram[:, 0]).real
    return max(num / y[0].real, 0.0)


def schur_inverse_entry(A) -> float:
    """``[A^{-1}]_{11}`` via the Schur complement of the leading entry."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidParameter(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, np.conj(A.T), rtol=1e-12, atol=1e-12 * np.abs(A).max()):
        raise InvalidParameter("matrix is not Hermitian")
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise InvalidParameter("matrix is not positive definite") from None
    a11 = A[0, 0].real
    if A.shape[0] == 1:
        return 1.0 / a11
    a = A[1:, 0]
    s = a11 - np.vdot(a, np.linalg.solve(A[1:, 1:], a)).real
    return 1.0 / s


def mmse_sinr_schur(r: NetworkRealization) -> float:
    """MMSE SINR as ``snr lambda1^2 u^* W (I + D D^*)^{-1} W^* u``.

    ``W D Z`` is the SVD of the interference block ``G~_{-1}``; directions
    without interference (when K < m) get ``d_i = 0``.
    """
    m = r.m
    base = r.snr * r.tagged.lambda1**2
    if r.K == 0:
        return base
    Gm = r.channels * np.sqrt(r.powers)[None, :]
    W, d, _ = np.linalg.svd(Gm)
    d2 = np.zeros(m)
    d2[: d.shape[0]] = d**2
    proj = np.abs(np.conj(W.T) @ r.tagged.u1) ** 2
    return float(base * np.sum(proj / (1.0 + d2)))


def realized_sinr(w, r: NetworkRealization) -> float:
    """SINR of the tagged stream when combined with filter ``w``."""
    w = np.asarray(w, dtype=np.complex128)
    wn = np.vdot(w, w).real
    if wn == 0:
        raise InvalidParameter("filter must be nonzero")
    sig = r.snr * r.tagged.lambda1**2 * abs(np.vdot(w, r.tagged.u1)) ** 2
    interf = np.sum(r.powers * np.abs(np.conj(w) @ r.channels) ** 2) if r.K else 0.0
    return float(sig / (wn + interf))


def mmse_filter(r: NetworkRealization, known=None, noise: float = 1.0) -> np.ndarray:
    """MMSE combining vector ``(noise I + sum_known p_k h_k h_k^*)^{-1} u1``."""
    h = r.channels if known is None else r.channels[:, known]
    p = r.powers if known is None else r.powers[known]
    C = noise * np.eye(r.m, dtype=np.complex128) + (h * p[None, :]) @ np.conj(h.T)
    return np.linalg.solve(C, r.tagged.u1)


def strongest(powers, n):
    """Indices of the ``n`` largest powers (ties broken by index)."""
    return np.argsort(-np.asarray(powers), kind="stable")[:n]


def zf_filter(r: NetworkRealization) -> np.ndarray:
    """Zero-forcing filter nulling the ``min(K, m-1)`` strongest interferers.

    The filter is the conjugate of the tagged row of the pseudo-inverse of
    ``[u1, h_cancelled]``, i.e. the part of ``u1`` orthogonal to the
    cancelled interferer directions.
    """
    n = min(r.K, r.m - 1)
    if n == 0:
        return r.tagged.u1.copy()
    G = np.column_stack([r.tagged.u1, r.channels[:, strongest(r.powers, n)]])
    return np.conj(np.linalg.pinv(G)[0])


def zf_sinr(r: NetworkRealization) -> float:
    return realized_sinr(zf_filter(r), r)


def partial_csi_filter(r: NetworkRealization, csi_range: float) -> np.ndarray:
    known = r.distances <= csi_range
    noise = 1.0 + float(np.sum(r.powers[~known]))
    return mmse_filter(r, known=known, noise=noise)


def partial_csi_sinr(r: NetworkRealization, scenario: Scenario) -> float:
    """Realized SINR of MMSE built from nearby channels only.

    Interferers farther than ``scenario.csi_range`` are folded into a white
    noise floor of ``1 + sum p_k``; the SINR is then evaluated under the
    true channel with every interferer present.
    """
    return realized_sinr(partial_csi_filter(r, scenario.csi_range), r)


def detector_sinr(r: NetworkRealization, scenario: Scenario) -> float:
    if scenario.detector == "mmse":
        return mmse_sinr(r)
    if scenario.detector == "zf":
        return zf_sinr(r)
    return partial_csi_sinr(r, scenario)


# ---------------------------------------------------------------------------
# batched paths for the Monte Carlo engine


@dataclass(frozen=True)
class RealizationBatch:
    snr: float
    lambda1: np.ndarray  # (n,)
    u1: np.ndarray  # (n, m)
    channels: np.ndarray  # (n, m, K)
    powers: np.ndarray  # (n, K)
    distances: np.ndarray  # (n, K)

    @property
    def signal(self) -> np.ndarray:
        return (np.sqrt(self.snr) * self.lambda1)[:, None] * self.u1


def build_batch(scenario: Scenario, K: int, keys) -> RealizationBatch:
    keys = np.atleast_1d(np.asarray(keys, dtype=np.uint64))
    n, m = keys.shape[0], scenario.m
    H = seeding.complex_normals(seeding.substream(keys, seeding.CHANNEL), m * m).reshape(n, m, m)
    lam, u = randmat.dominant_modes(H)
    if K:
        d = geometry.distances_from_uniforms(
            seeding.uniforms(seeding.substream(keys, seeding.DISTANCE), K), scenario
        )
        h = np.ascontiguousarray(_interferer_vectors(keys, m, K))
    else:
        d = np.empty((n, 0))
        h = np.empty((n, m, 0), dtype=np.complex128)
    return RealizationBatch(scenario.snr, lam, u, h, geometry.powers_from_distances(d, scenario), d)


def _check_conditioning(b: RealizationBatch, noise):
    # covariance eigenvalues lie in [noise, noise + trace]
    load = np.einsum("nk,nmk->n", b.powers, np.abs(b.channels) ** 2)
    if np.any((noise + load) / noise > COND_LIMIT):
        raise NumericFailure(f"covariance condition number exceeds {COND_LIMIT:g}")


def batch_mmse_sinr(b: RealizationBatch) -> np.ndarray:
    n = b.lambda1.shape[0]
    noise = np.ones(n)
    _check_conditioning(b, noise)
    g0 = b.signal
    w = _backend.kernels.mmse_solve(g0, b.channels, b.powers, noise)
    return np.maximum(np.einsum("nm,nm->n", np.conj(g0), w).real, 0.0)


def batch_partial_csi_sinr(b: RealizationBatch, csi_range: float) -> np.ndarray:
    known = b.distances <= csi_range
    noise = 1.0 + np.where(known, 0.0, b.powers).sum(axis=1)
    _check_conditioning(b, noise)
    g0 = b.signal
    w = _backend.kernels.mmse_solve(g0, b.channels, np.where(known, b.powers, 0.0), noise)
    return _backend.kernels.filter_sinr(w, g0, b.channels, b.powers)


def batch_zf_sinr(b: RealizationBatch) -> np.ndarray:
    n, m, K = b.channels.shape
    r = min(K, m - 1)
    u = b.u1
    if r == 0:
        w = u
    else:
        idx = np.argsort(-b.powers, axis=1, kind="stable")[:, :r]
        A = np.take_along_axis(b.channels, idx[:, None, :], axis=2)
        Ah = np.conj(np.swapaxes(A, 1, 2))
        coef = np.linalg.solve(Ah @ A, (Ah @ u[:, :, None]))
        w = u - (A @ coef)[:, :, 0]
    return _backend.kernels.filter_sinr(np.ascontiguousarray(w), b.signal, b.channels, b.powers)


def batch_sinr(b: RealizationBatch, scenario: Scenario) -> np.ndarray:
    if scenario.detector == "mmse":
        return batch_mmse_sinr(b)
    if scenario.detector == "zf":
        return batch_zf_sinr(b)
    return batch_partial_csi_sinr(b, scenario.csi_range)
