"""Shared per-message random bitstreams.

Encoder and decoder both hold a 256-bit master seed.  The infinite bitstream
for message m is expanded lazily in 64-bit blocks by a keyed mixing function,
so both parties see bit-identical streams without storing anything.  The
expansion is a splitmix-style finalizer chain; it is *not* a cryptographic
claim, just a fast keyed PRNG whose streams behave like fair coins (see the
bit-balance and pairwise-collision tests).
"""

from __future__ import annotations

import hashlib
import math
import secrets
from dataclasses import dataclass

import numpy as np

from .errors import StreamCapExceededError

# Per-stream hard cap: converts an astronomically unlikely non-terminating
# prefix search into a reported error.
STREAM_BIT_CAP = 1 << 20

_U64 = np.uint64
MASK64 = _U64(0xFFFFFFFFFFFFFFFF)
_PHI = _U64(0x9E3779B97F4A7C15)
_MUL1 = _U64(0xBF58476D1CE4E5B9)
_MUL2 = _U64(0x94D049BB133111EB)


def _mix(z):
    z = (z ^ (z >> _U64(30))) * _MUL1
    z = (z ^ (z >> _U64(27))) * _MUL2
    return z ^ (z >> _U64(31))


def raw_blocks(w0, w1, w2, w3, m, j):
    """64-bit block j of the stream for message m, keyed by seed words w0..w3.

    All arguments are uint64 scalars or broadcastable arrays.  Bits within a
    block are consumed most-significant first.
    """
    with np.errstate(over="ignore"):
        z = _mix((m * _PHI + j) ^ w0)
        z = _mix(z + w1)
        z = _mix(z + w2)
        return z ^ w3


def bit_length_u64(x):
    """Vectorized bit length of uint64 values (0 -> 0, 1 -> 1, ...)."""
    x = np.asarray(x, dtype=np.uint64)
    n = np.zeros(x.shape, dtype=np.int64)
    for sh in (32, 16, 8, 4, 2, 1):
        t = x >> _U64(sh)
        big = t > 0
        n += big * sh
        x = np.where(big, t, x)
    n += x > 0
    return n


@dataclass(frozen=True)
class StreamSeed:
    """256-bit master seed, hex-encoded. Equal seeds give bit-identical streams."""

    hex: str

    def __post_init__(self):
        h = self.hex.lower()
        if len(h) != 64 or any(c not in "0123456789abcdef" for c in h):
            raise ValueError("seed must be a 64-hex-character string")
        object.__setattr__(self, "hex", h)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "StreamSeed":
        if len(raw) != 32:
            raise ValueError("seed must be 32 bytes")
        return cls(raw.hex())

    @classmethod
    def random(cls) -> "StreamSeed":
        return cls(secrets.token_hex(32))

    @property
    def key(self) -> bytes:
        return bytes.fromhex(self.hex)

    def words(self) -> np.ndarray:
        """The seed as four uint64 words (big-endian)."""
        return np.frombuffer(self.key, dtype=">u8").astype(np.uint64)

    def derive(self, label: bytes) -> "StreamSeed":
        d = hashlib.blake2b(label, key=self.key, digest_size=32).digest()
        return StreamSeed.from_bytes(d)

    def derive_trial(self, trial_index: int) -> "StreamSeed":
        """Fresh, reproducible seed for one Monte Carlo trial."""
        return self.derive(b"trial:" + int(trial_index).to_bytes(8, "big"))

    def rng_int(self, label: bytes) -> int:
        """Deterministic integer for seeding numpy Generators."""
        d = hashlib.blake2b(b"rng:" + label, key=self.key, digest_size=16).digest()
        return int.from_bytes(d, "big")


@dataclass(frozen=True)
class BitPrefix:
    """A finite prefix of a bitstream; first-transmitted bit first."""

    bits: str

    def __post_init__(self):
        if any(c not in "01" for c in self.bits):
            raise ValueError("bits must be a string of '0'/'1'")

    @property
    def length(self) -> int:
        return len(self.bits)

    def is_prefix_of(self, other: "BitPrefix") -> bool:
        return other.bits.startswith(self.bits)


def stream_bits(seed: StreamSeed, message_index: int, n: int) -> BitPrefix:
    """First n bits of the stream for message_index under seed.

    Deterministic and prefix-consistent: the result for n=a is a prefix of
    the result for n=b whenever a <= b.
    """
    if message_index < 0:
        raise ValueError("message index must be nonnegative")
    if n < 0:
        raise ValueError("bit count must be nonnegative")
    if n > STREAM_BIT_CAP:
        raise StreamCapExceededError(
            f"requested {n} bits, cap is {STREAM_BIT_CAP}"
        )
    if n == 0:
        return BitPrefix("")
    nb = math.ceil(n / 64)
    w = seed.words()
    j = np.arange(nb, dtype=np.uint64)
    blocks = raw_blocks(w[0], w[1], w[2], w[3], _U64(message_index), j)
    bits = "".join(format(int(b), "064b") for b in blocks)
    return BitPrefix(bits[:n])


def trial_words(seed: StreamSeed, trials: int) -> np.ndarray:
    """(trials, 4) uint64 matrix of per-trial seed words.

    Row t equals seed.derive_trial(t).words(); this is the bulk form the
    harness uses.
    """
    key = seed.key
    out = np.empty((trials, 4), dtype=np.uint64)
    for t in range(trials):
        d = hashlib.blake2b(
            b"trial:" + t.to_bytes(8, "big"), key=key, digest_size=32
        ).digest()
        out[t] = np.frombuffer(d, dtype=">u8")
    return out
