"""Seeded random streams.

Every random draw in the package flows through Philox, a counter-based
bit generator.  Streams are keyed by tuples of integers (or short strings),
so independent substreams can be derived without coordination: the trial
stream for (master_seed, sweep_index, trial_index) is the same whether
trials run serially or on a worker pool.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _as_key_word(part) -> int:
    """Map a key part to a non-negative 64-bit integer."""
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"rng key parts must be ints or strings, got {type(part)!r}")


def make_rng(*key) -> np.random.Generator:
    """Independent Philox stream addressed by a key tuple.

    Equal keys give identical streams on every platform; distinct keys give
    statistically independent streams.
    """
    if not key:
        raise ValueError("make_rng needs at least one key part")
    words = [_as_key_word(part) for part in key]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def fresh_seed() -> int:
    """Draw a seed from OS entropy, for callers that did not supply one."""
    return int(np.random.SeedSequence().entropy) & 0x7FFFFFFFFFFFFFFF
