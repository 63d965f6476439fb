"""Deterministic seed derivation for Monte-Carlo cells."""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix_seed(base: int, cell: int, instance: int) -> int:
    """Seed for ``instance`` of ``cell``: three chained splitmix64 rounds.

    Changing one grid cell never reshuffles the seeds of another.  The
    result fits in 63 bits so it is a valid seed everywhere.
    """
    h = _splitmix64(int(base) & _MASK)
    h = _splitmix64(h ^ (int(cell) & _MASK))
    h = _splitmix64(h ^ (int(instance) & _MASK))
    return h >> 1
