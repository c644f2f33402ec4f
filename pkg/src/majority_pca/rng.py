"""Counter-based keyed randomness.

Every random number used by the simulator is a pure function of a key
``(seed, t, x, y, j)``.  No generator state is carried between calls, so a
grid may be updated in any order, by any number of workers, and the result
is bit-identical.

The mixing function is the SplitMix64 finalizer applied to a Weyl-style
encoding of the key.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# slot j = 0 is reserved for the error flip; draw i uses slot i + 1
FLIP_SLOT = 0
MAX_SLOTS = 1 << 12
_X_SHIFT = 38
_Y_SHIFT = 12
MAX_COORD = 1 << 26


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (scalar path)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


def spawn_seed(seed: int, stream: int) -> int:
    """Derive the seed of an independent stream (e.g. a replica index)."""
    return mix64(mix64(seed & MASK64) ^ mix64((stream + 1) * GOLDEN))


def step_key(seed: int, t: int) -> int:
    """Key shared by every draw of time step ``t``."""
    return mix64(mix64(seed & MASK64) + (t + 1) * GOLDEN)


def cell_counters(xs: np.ndarray, ys: np.ndarray, slots: np.ndarray) -> np.ndarray:
    """Pre-mixed counters for cells ``(xs, ys)`` and draw slots ``slots``.

    The arrays broadcast against each other.  The result only depends on the
    coordinates, so it can be computed once per grid shape and reused at
    every step.
    """
    xs = np.asarray(xs, dtype=np.uint64)
    ys = np.asarray(ys, dtype=np.uint64)
    slots = np.asarray(slots, dtype=np.uint64)
    c = (xs << np.uint64(_X_SHIFT)) | (ys << np.uint64(_Y_SHIFT)) | slots
    with np.errstate(over="ignore"):
        return (c + np.uint64(1)) * np.uint64(GOLDEN)


def keyed_bits(key: int | np.ndarray, counters: np.ndarray) -> np.ndarray:
    """64 random bits per counter under ``key`` (scalar or broadcastable)."""
    with np.errstate(over="ignore"):
        return _mix64_array(counters ^ np.asarray(key, dtype=np.uint64))


def bits_to_unit(bits: np.ndarray) -> np.ndarray:
    """Map 64-bit words to floats uniform on [0, 1) with 53-bit resolution."""
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def bits_to_index(bits: np.ndarray, n: int) -> np.ndarray:
    """Map 64-bit words to integers uniform on ``range(n)``, ``n < 2**32``.

    Multiply-shift on the high 32 bits; the bias is below ``n / 2**32``.
    """
    return ((bits >> np.uint64(32)) * np.uint64(n)) >> np.uint64(32)


def uniform(seed: int, t: int, x: int, y: int, j: int) -> float:
    """Scalar reference: the uniform value attached to one key."""
    c = cell_counters(np.array([x]), np.array([y]), np.array([j]))
    return float(bits_to_unit(keyed_bits(step_key(seed, t), c))[0])
