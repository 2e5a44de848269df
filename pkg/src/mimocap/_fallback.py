"""Pure-numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
The two must agree bit-for-bit on the integer hashing and to rounding on
everything else; ``tests/test_kernels.py`` holds them to that.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_PI = 6.283185307179586
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z):
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def uniforms(keys, start, count):
    """Counter-based uniforms in (0, 1).

    Row ``i`` holds outputs ``start .. start+count-1`` of the SplitMix64
    sequence whose state starts at ``keys[i]``.
    """
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    j = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = mix64(keys[:, None] + j[None, :] * GOLDEN)
    return ((z >> _S11).astype(np.float64) + 0.5) * _INV_2_53


def complex_normals(keys, start, count):
    """Unit-variance circular complex Gaussians, one per uniform pair."""
    u = uniforms(keys, 2 * start, 2 * count)
    r = np.sqrt(-np.log(u[:, 0::2]))
    angle = _TWO_PI * u[:, 1::2]
    out = np.empty(r.shape, dtype=np.complex128)
    out.real = r * np.cos(angle)
    out.imag = r * np.sin(angle)
    return out


def mmse_solve(g0, h, p, noise):
    """Solve ``(noise*I + sum_k p_k h_k h_k^H) w = g0`` for each trial.

    Shapes: g0 (n, m), h (n, m, K), p (n, K), noise (n,). Returns (n, m).
    """
    g0 = np.asarray(g0, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    n, m = g0.shape
    cov = (h * np.asarray(p, dtype=np.float64)[:, None, :]) @ np.conj(np.swapaxes(h, 1, 2))
    cov += np.asarray(noise, dtype=np.float64)[:, None, None] * np.eye(m)
    return np.linalg.solve(cov, g0[:, :, None])[:, :, 0]


def filter_sinr(w, g0, h, p):
    """Realized SINR ``|w^H g0|^2 / (|w|^2 + sum_k p_k |w^H h_k|^2)`` per trial."""
    w = np.asarray(w, dtype=np.complex128)
    wc = np.conj(w)
    sig = np.abs(np.einsum("nm,nm->n", wc, g0)) ** 2
    proj = np.abs(np.einsum("nm,nmk->nk", wc, h)) ** 2
    den = np.einsum("nm,nm->n", wc, w).real + np.einsum("nk,nk->n", proj, p)
    return sig / den
