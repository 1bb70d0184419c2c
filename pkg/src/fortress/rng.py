"""Deterministic 64-bit pseudo-random generator (splitmix64).

Every random choice in the simulator flows through one Rng instance so
that a fixed seed reproduces a run bit for bit.  The generator is the
published splitmix64 mixer: a Weyl sequence on the golden-gamma constant
followed by two multiply-xorshift folds.  It is tiny, fast, and easy to
port, which matters because other runtimes must replicate the stream
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


@dataclass
class Rng:
    """splitmix64 stream; `state` is the full generator state."""

    state: int = 0

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Next value reduced mod n (n must be positive)."""
        if n <= 0:
            raise ValueError("modulus must be positive")
        return self.next_u64() % n

    def choice(self, seq):
        """Uniform pick from a non-empty sequence."""
        if not seq:
            raise ValueError("empty sequence")
        return seq[self.below(len(seq))]

    def clone(self) -> Rng:
        return Rng(self.state)
