"""Seed derivation and reproducible sampling helpers."""
from __future__ import annotations

import math
import random

_MASK = (1 << 64) - 1


def mix64(seed: int, index: int) -> int:
    """splitmix64-style mix of a base seed and a stream index."""
    z = (seed + 0x9E3779B97F4A7C15 * (index + 1)) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def exponential(rng: random.Random, rate: float) -> float:
    """Inverse-CDF exponential draw from a 64-bit uniform."""
    u = (rng.getrandbits(64) + 1) / (1 << 64)  # u in (0, 1]
    return -math.log(u) / rate
