"""Deterministic RNG streams.

All randomness in the library flows through numpy's PCG64 generator,
seeded through ``numpy.random.SeedSequence`` with an explicit hierarchical
key.  A stream is fully named by ``(seed, *key)`` where the key components
are small integers, so any experiment can be replayed (or re-implemented
in another language: the algorithm is "PCG64 seeded by SeedSequence over
the entropy tuple").

Conventional top-level key components:

* ``ADVERSARY`` -- the adversary's private coins
* ``SMOOTHING`` -- the smoothing coins and uniform replacement edges
* ``TRIAL``     -- per-trial derived streams in the harness
"""

from __future__ import annotations

import numpy as np

ADVERSARY = 0xAD
SMOOTHING = 0x5E
TRIAL = 0x7A


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator named by ``(seed, *key)``."""
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def adversary_stream(seed: int, trial: int = 0) -> np.random.Generator:
    return stream(seed, ADVERSARY, trial)


def smoothing_stream(seed: int, trial: int = 0) -> np.random.Generator:
    return stream(seed, SMOOTHING, trial)


def trial_stream(seed: int, trial: int, *key: int) -> np.random.Generator:
    return stream(seed, TRIAL, trial, *key)
