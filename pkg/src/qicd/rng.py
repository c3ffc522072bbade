"""Seeded random-number streams and seed mixing for reproducible runs.

Every stochastic component takes an explicit seed or generator. Derived
streams (per trial, per iteration, per null replicate) are obtained with
``mix`` so that results never depend on how many draws another component
consumed.
"""

from __future__ import annotations

import numpy as np

# Generator family recorded in run manifests. PCG64 is a 64-bit permuted
# congruential generator with period 2^128.
RNG_NAME = "pcg64"

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix(*parts: int) -> int:
    """Combine integers into a derived 64-bit seed, deterministically."""
    h = 0
    for part in parts:
        h = _splitmix64(h ^ (int(part) & _MASK64))
    return h


def make_rng(seed: int) -> np.random.Generator:
    """Return a fresh PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))
