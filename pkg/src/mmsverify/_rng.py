"""Seedable, portable random stream with per-search-node substreams.

SplitMix64 is the generator: 64-bit state advanced by the golden-gamma
constant, output scrambled by the usual two-multiply finalizer.  It is
trivial to reimplement bit-for-bit anywhere, which is what makes proof
logs replayable across machines.

Substream derivation: a node's stream seed is the run seed folded with
one mixing step per branch decision on the path from the root ('0' =
negative child, '1' = positive child).  Distinct paths give independent
streams, and a node's stream does not depend on traversal order.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_NEG_TAG = 0xD1B54A32D192ED03
_POS_TAG = 0x8BB84B93962EACC9


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def node_seed(seed: int, path: str) -> int:
    """Substream seed for the node reached by the given branch path."""
    x = seed & _MASK
    for ch in path:
        x = _mix(x ^ (_POS_TAG if ch == "1" else _NEG_TAG))
    return x


class Stream:
    """SplitMix64 stream of 64-bit words."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return _mix(self.state)

    def below(self, m: int) -> int:
        """Uniform-enough draw in [0, m); plain modulo, by design fixed."""
        if m <= 0:
            raise ValueError("empty range")
        return self.next_u64() % m
