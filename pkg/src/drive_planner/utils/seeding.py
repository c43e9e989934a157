"""Deterministic seed derivation shared by workers, experts and evaluation."""

import numpy as np


def derive_seed(base_seed: int, *keys: int) -> int:
    """Derive a child seed from a base seed and integer keys (stable across runs)."""
    sequence = np.random.SeedSequence([int(base_seed), *[int(k) for k in keys]])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_rng(base_seed: int, *keys: int) -> np.random.Generator:
    """Create a generator for the (seed, keys) stream."""
    return np.random.default_rng(np.random.SeedSequence([int(base_seed), *keys]))

