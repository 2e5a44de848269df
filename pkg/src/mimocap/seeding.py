"""Counter-based random streams.

Every random quantity in the package is a pure function of a 64-bit key and
a position, so a Monte Carlo trial can be regenerated in isolation and
results do not depend on execution order or chunking.

The construction is SplitMix64 throughout:

* ``trial_key(master, i)`` is output ``i`` of a SplitMix64 sequence whose
  state starts at ``mix64(master)``;
* ``substream(key, tag)`` separates independent quantities inside a trial
  (channel, distances, interferer vectors, ...);
* position ``j`` of a stream is ``mix64(key + (j + 1) * GOLDEN)``, mapped to
  a double in (0, 1) from its top 53 bits.
"""

import numpy as np

from . import _backend
from ._fallback import GOLDEN, mix64

_SUB = np.uint64(0xD1B54A32D192ED03)

# substream tags
CHANNEL = 0
DISTANCE = 1
INTERFERER = 2
COUNT = 3
OUTER = 4


def _as_keys(keys):
    return np.atleast_1d(np.asarray(keys, dtype=np.uint64))


def trial_keys(master_seed, start, n):
    """Keys of trials ``start .. start+n-1`` under ``master_seed``."""
    base = mix64(np.array([master_seed], dtype=np.uint64))[0]
    i = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(base + i * GOLDEN)


def trial_key(master_seed, i):
    return int(trial_keys(master_seed, i, 1)[0])


def substream(keys, tag):
    keys = _as_keys(keys)
    with np.errstate(over="ignore"):
        return mix64(keys + np.uint64(tag + 1) * _SUB)


def uniforms(keys, count, start=0):
    """(n, count) uniforms in (0, 1) for each key."""
    return _backend.kernels.uniforms(_as_keys(keys), start, count)


def complex_normals(keys, count, start=0):
    """(n, count) unit-variance circular complex Gaussians for each key."""
    return _backend.kernels.complex_normals(_as_keys(keys), start, count)
