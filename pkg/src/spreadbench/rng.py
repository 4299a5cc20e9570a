"""Counter-based random number streams for reproducible Monte Carlo.

Every simulation run gets its own stream, derived deterministically from
(master_seed, seed_node, run_index) with SplitMix64-style mixing. Streams are
independent of worker count and scheduling, so parallel execution cannot
change results. The same derivation is re-implemented inside the compiled
simulation kernel; `tests/test_epidemic.py` asserts both sides agree bit for
bit.
"""
from __future__ import annotations

RNG_ID = "splitmix64-v1"

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_NODE_SALT = 0xD1342543DE82EF95
_RUN_SALT = 0xDA942042E4DD58B5
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mix of a 64-bit word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def stream_seed(master_seed: int, node: int, run: int) -> int:
    """64-bit state for the stream of run `run` seeded at node `node`."""
    s = mix64(master_seed & _MASK)
    s = mix64(s ^ (((node + 1) * _NODE_SALT) & _MASK))
    s = mix64(s ^ (((run + 1) * _RUN_SALT) & _MASK))
    return s


class RngStream:
    """SplitMix64 sequence over a derived state; emits uniforms in [0, 1)."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & _MASK

    @classmethod
    def for_run(cls, master_seed: int, node: int, run: int) -> "RngStream":
        return cls(stream_seed(master_seed, node, run))

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return mix64(self.state)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53
