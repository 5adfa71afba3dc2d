"""Deterministic 64-bit RNG for pivot selection and seed derivation.

Both solver kernels (compiled and pure Python) step the exact same
SplitMix64 stream, so a solve replays identically regardless of backend.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 generator with a single 64-bit word of state."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def next_below(self, bound: int) -> int:
        """Uniform draw in [0, bound). Consumes exactly one raw draw."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return self.next_u64() % bound


def derive_seed(master: int, *fields: int) -> int:
    """Derive a stable sub-seed from a master seed and integer coordinates.

    Used by the benchmark harness so each (use case, size, layout) cell sees
    its own reproducible stream independent of execution order.
    """
    state = master & MASK64
    for field in fields:
        state = SplitMix64(state ^ (field & MASK64)).next_u64()
    return state
