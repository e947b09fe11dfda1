"""Counter-based randomness.

Every random quantity in this package is a pure function of a 64-bit key and
one or more counters, computed with a splitmix64-style mixer.  There is no
sequential generator state, which buys three things at once:

* bitwise reproducibility of any estimate given (master seed, replica count),
  independent of execution order or parallelism;
* exact monotone coupling across retention probabilities: the uniform attached
  to an edge depends only on (key, edge index), so raising p opens a superset
  of edges for a fixed seed;
* agreement between lazy cluster exploration and full-configuration sampling,
  which examine edges in different orders but see identical uniforms.

Replica r of an estimator uses key = master_seed XOR (r * GOLDEN) mod 2^64.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Weyl increment used for replica derivation (and inside the mixer).
GOLDEN = 0x9E3779B97F4A7C15

# Distinct odd multipliers keep the (key, counter) streams for different
# purposes from colliding.
_STREAM_MULT = 0xD1342543DE82EF95


def splitmix64(x: int) -> int:
    """One splitmix64 finalization round on a 64-bit integer."""
    x = (x + GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_replica_seed(master_seed: int, replica: int) -> int:
    """Seed for replica r: master XOR (r * GOLDEN), mod 2^64."""
    return (master_seed ^ ((replica * GOLDEN) & MASK64)) & MASK64


def mix2(key: int, counter: int) -> int:
    """64-bit hash of (key, counter); the basic keyed counter step."""
    return splitmix64(key ^ ((counter + 1) * _STREAM_MULT & MASK64))


def uniform(key: int, counter: int) -> float:
    """Uniform float64 in [0, 1) attached to (key, counter)."""
    return (mix2(key, counter) >> 11) * 2.0**-53


def uniforms(key: int, counters: np.ndarray) -> np.ndarray:
    """Vectorized `uniform` over an array of counters."""
    x = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = (x + np.uint64(1)) * np.uint64(_STREAM_MULT)
        x ^= np.uint64(key)
        x = (x + np.uint64(GOLDEN))
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return (x >> np.uint64(11)).astype(np.float64) * 2.0**-53
