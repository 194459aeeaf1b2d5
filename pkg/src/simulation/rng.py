"""Seeded, splittable random streams.

A stream is identified by (seed, role tags). Each tag is hashed to a 32-bit integer with
BLAKE2b and the tuple of hashes becomes the `spawn_key` of a `numpy.random.SeedSequence`
built on the seed, so distinct roles give statistically independent PCG64 streams and the
same (seed, tags) always gives the same stream.
"""

from __future__ import annotations

import hashlib

import numpy as np


def tag_hash(tag: str | int) -> int:
    digest = hashlib.blake2b(str(tag).encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def seed_sequence(seed: int, *tags: str | int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(tag_hash(tag) for tag in tags))


def stream(seed: int, *tags: str | int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *tags)))


def derive_seed(seed: int, *tags: str | int) -> int:
    """A 64-bit child seed, e.g. the seed of replication b of a campaign."""
    return int(seed_sequence(seed, *tags).generate_state(1, dtype=np.uint64)[0])
