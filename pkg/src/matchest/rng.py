"""Seeded hashing primitives shared by every randomized component.

All randomness in this package flows through two constructions built on a
64-bit finalizer (`mix64`):

* `Stream` -- a keyed counter generator.  A stream is addressed by a seed
  plus integer tags, so any component can derive an independent, replayable
  sequence without coordinating with the rest of the run.
* `RankFunction` -- a deterministic map from an unordered vertex pair to a
  64-bit rank, realizing a lazily evaluated random edge permutation.  Fixing
  the seed fixes every rank, and distinct edges collide with probability
  2**-64 per pair; collisions are detected by consumers and raised as
  `RankCollisionError`.

The compiled kernel embeds the same arithmetic in C; `tests/test_kernel_parity`
pins the two implementations against each other.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class RankCollisionError(RuntimeError):
    """Two distinct edges hashed to the same rank; re-seed and retry."""


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit scrambler."""
    x = int(x) & MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, *tags: int) -> int:
    """Fold integer tags into a seed, yielding an independent child seed."""
    h = mix64(seed)
    for t in tags:
        h = mix64((h + _GOLDEN + (int(t) & MASK64)) & MASK64)
    return h


class Stream:
    """Counter-based generator over the SplitMix64 sequence.

    Instances are cheap; create one per logical purpose (derive the seed
    with `derive_seed`) rather than sharing a stream across components.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = int(seed) & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return mix64(self._state)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n).  Modulo bias is < n / 2**64."""
        if n <= 0:
            raise ValueError("next_below needs a positive bound")
        return self.next_u64() % n

    def next_unit(self) -> float:
        """Uniform float in [0, 1)."""
        return self.next_u64() / 2.0**64


def edge_key(u: int, v: int) -> int:
    """Canonical 64-bit key of an unordered vertex pair (ids < 2**32)."""
    if u > v:
        u, v = v, u
    return (u << 32) | v


class RankFunction:
    """Deterministic edge -> rank map realizing a random permutation.

    Ranks are 64-bit integers; `rank` exposes them as reals in (0, 1) for
    reporting.  Comparisons must use `rank_u64` so that equality is exact.
    """

    __slots__ = ("seed", "_mixed")

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._mixed = mix64(self.seed)

    def rank_u64(self, u: int, v: int) -> int:
        return mix64(edge_key(u, v) ^ self._mixed)

    def rank(self, u: int, v: int) -> float:
        # map to (0,1): the zero rank is displaced by half an ulp
        return (self.rank_u64(u, v) + 0.5) / 2.0**64

    def derive(self, salt: int) -> "RankFunction":
        """Child rank function (used to re-seed after a detected collision)."""
        return RankFunction(derive_seed(self.seed, salt))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RankFunction(seed={self.seed:#x})"
