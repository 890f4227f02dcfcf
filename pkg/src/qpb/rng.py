"""Seeded, splittable random streams.

Every stream is a Philox counter-based generator whose 128-bit key packs the
user seed (low 64 bits) with a stream index (high 64 bits). Streams are
therefore independent of the order in which they are consumed.
"""

from __future__ import annotations

import numpy as np

U64_MASK = (1 << 64) - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= U64_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream_key(seed: int, index: int) -> int:
    return check_seed(seed) | ((int(index) & U64_MASK) << 64)


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for stream ``index`` of ``seed``."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, index)))


def stream_uniforms(seed: int, index: int, count: int) -> np.ndarray:
    """First ``count`` doubles in [0, 1) of stream ``index`` (53-bit resolution)."""
    raw = np.random.Philox(key=stream_key(seed, index)).random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def derive_seed(seed: int, *path: int) -> int:
    """Child seed for a labelled sub-task, e.g. ``derive_seed(seed, theta_index, repeat)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
