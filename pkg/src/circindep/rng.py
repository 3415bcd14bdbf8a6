"""Deterministic random-stream derivation for reproducible simulations.

Every stochastic routine in the package draws from a generator derived
from an integer seed plus a path of labels, e.g. ``(scenario_id,
replicate_index)``.  Streams derived from distinct paths are independent,
and the derivation does not depend on execution order, so results are
identical whether replicates run serially or in parallel.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["derive_rng", "derive_seed"]


def _key_to_int(key: int | str) -> int:
    if isinstance(key, bool):
        raise TypeError("stream keys must be int or str, not bool")
    if isinstance(key, int):
        if key < 0:
            raise ValueError("integer stream keys must be non-negative")
        return key
    if isinstance(key, str):
        # crc32 is stable across platforms and Python versions, unlike hash().
        return zlib.crc32(key.encode("utf-8"))
    raise TypeError(f"stream keys must be int or str, got {type(key)!r}")


def derive_rng(seed: int, *path: int | str) -> np.random.Generator:
    """Return a generator for the stream identified by ``seed`` and ``path``."""
    spawn_key = tuple(_key_to_int(k) for k in path)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=spawn_key))


def derive_seed(seed: int, *path: int | str) -> int:
    """Collapse ``(seed, path)`` to a single integer seed.

    Used where an API takes a plain seed (e.g. cached null tables) but the
    value must still be a deterministic function of a parent seed.
    """
    spawn_key = tuple(_key_to_int(k) for k in path)
    state = np.random.SeedSequence(seed, spawn_key=spawn_key).generate_state(2)
    return int(state[0]) << 32 | int(state[1])
