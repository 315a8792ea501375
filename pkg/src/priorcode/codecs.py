"""The two mismatched-prior coding schemes over shared random bitstreams.

Both schemes transmit a prefix of the sender-side stream r_m for the chosen
message m; the decoder collects every message whose stream starts with the
received bits and outputs the one its own prior Q likes best.

* Error-free: the prefix is extended until every message whose sender
  probability is at least P(m)/alpha^2 has already diverged from r_m, which
  makes the maximum-likelihood answer under any alpha-close Q unique.
* Positive-error: the prefix length is the deterministic value
  ceil(log2(alpha / (P(m) * epsilon))); decoding then fails with probability
  at most epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Distribution, entropy
from .errors import DecodeError, StreamCapExceededError
from .randomness import (
    STREAM_BIT_CAP,
    BitPrefix,
    StreamSeed,
    bit_length_u64,
    raw_blocks,
    stream_bits,
)

_U64 = np.uint64


@dataclass(frozen=True)
class Codeword:
    """A transmitted bitstring. One-shot coding: the length is known out of
    band, codewords are not self-delimiting."""

    prefix: BitPrefix

    @property
    def length(self) -> int:
        return self.prefix.length


@dataclass(frozen=True)
class EncodeTrace:
    """Codeword plus the work the error-free encoder did to find it."""

    codeword: Codeword
    competitor_count: int
    stream_bits_read: int


def _check_encodable(m: int, P: Distribution, alpha: float):
    if not 0 <= m < P.size:
        raise ValueError(f"message index {m} out of range for {P.size} messages")
    if P.probs[m] <= 0:
        raise ValueError("cannot encode a zero-probability message")
    if alpha < 1:
        raise ValueError("closeness factor alpha must be >= 1")


def ceil_log2(x: float) -> int:
    """Smallest integer i >= 0 with 2**i >= x. Exact despite float log2."""
    if x <= 1.0:
        return 0
    i = max(0, math.ceil(math.log2(x)))
    if i > 0 and 2.0 ** (i - 1) >= x:
        i -= 1
    if 2.0**i < x:
        i += 1
    return i


def ceil_log2_array(x: np.ndarray) -> np.ndarray:
    """Vectorized ceil_log2 with the same fix-up against log2 rounding."""
    x = np.asarray(x, dtype=float)
    e = np.ceil(np.log2(np.maximum(x, 1.0))).astype(np.int64)
    e = np.maximum(e, 0)
    down = (e > 0) & (np.ldexp(1.0, (e - 1).astype(np.int32)) >= x)
    e[down] -= 1
    up = np.ldexp(1.0, e.astype(np.int32)) < x
    e[up] += 1
    e[x <= 1.0] = 0
    return e


def _competitors(m: int, P: Distribution, alpha: float) -> np.ndarray:
    """Indices m' != m with P(m') >= P(m) / alpha^2."""
    p = P.probs
    mask = p >= p[m] / (alpha * alpha)
    mask[m] = False
    return np.flatnonzero(mask)


def competitor_prefix_lengths(
    m: int, competitors: np.ndarray, seed: StreamSeed
) -> np.ndarray:
    """Length of the common prefix of r_m and r_m' for each competitor m'.

    Streams are compared block by block, only extending the ones that still
    fully agree; capped by STREAM_BIT_CAP.
    """
    w = seed.words()
    lcp = np.zeros(competitors.size, dtype=np.int64)
    pending = np.arange(competitors.size)
    j = 0
    while pending.size:
        if j * 64 >= STREAM_BIT_CAP:
            raise StreamCapExceededError(
                "competitor streams agree beyond the per-stream cap"
            )
        own = raw_blocks(w[0], w[1], w[2], w[3], _U64(m), _U64(j))
        theirs = raw_blocks(
            w[0], w[1], w[2], w[3], competitors[pending].astype(np.uint64), _U64(j)
        )
        x = theirs ^ own
        lcp[pending] += np.where(x == 0, 64, 64 - bit_length_u64(x))
        pending = pending[x == 0]
        j += 1
    return lcp


def encode_error_free(
    m: int, P: Distribution, alpha: float, seed: StreamSeed
) -> EncodeTrace:
    """Shortest prefix of r_m that every competitor has already diverged from.

    A competitor is any other message with sender probability at least
    P(m)/alpha^2.  With no competitors the codeword is empty.
    """
    _check_encodable(m, P, alpha)
    comp = _competitors(m, P, alpha)
    if comp.size == 0:
        return EncodeTrace(Codeword(BitPrefix("")), 0, 0)
    lcp = competitor_prefix_lengths(m, comp, seed)
    i = int(lcp.max()) + 1
    if i > STREAM_BIT_CAP:
        raise StreamCapExceededError("minimal separating prefix exceeds the cap")
    bits_read = int((lcp + 1).sum()) + i
    return EncodeTrace(Codeword(stream_bits(seed, m, i)), int(comp.size), bits_read)


def positive_error_length(p_m: float, alpha: float, epsilon: float) -> int:
    """Deterministic codeword length ceil(log2(alpha / (p_m * epsilon)))."""
    return ceil_log2(alpha / (p_m * epsilon))


def encode_positive_error(
    m: int, P: Distribution, alpha: float, epsilon: float, seed: StreamSeed
) -> Codeword:
    """Fixed-length-per-message scheme allowed to fail with probability epsilon."""
    _check_encodable(m, P, alpha)
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must be in (0, 1]")
    i = positive_error_length(float(P.probs[m]), alpha, epsilon)
    return Codeword(stream_bits(seed, m, i))


def decode_candidates(c: Codeword, n: int, seed: StreamSeed) -> np.ndarray:
    """All message indices whose stream starts with the received bits."""
    w = seed.words()
    idx = np.arange(n)
    L = c.length
    for j in range(math.ceil(L / 64)):
        if idx.size == 0:
            break
        take = min(64, L - 64 * j)
        chunk = _U64(int(c.prefix.bits[64 * j : 64 * j + take], 2))
        blk = raw_blocks(w[0], w[1], w[2], w[3], idx.astype(np.uint64), _U64(j))
        idx = idx[(blk >> _U64(64 - take)) == chunk]
    return idx


def decode_max_q(c: Codeword, Q: Distribution, seed: StreamSeed) -> int:
    """Most likely candidate under Q; ties broken by lowest message index."""
    idx = decode_candidates(c, Q.size, seed)
    if idx.size == 0:
        raise DecodeError(
            "no message matches the codeword; encoder/decoder seed mismatch"
        )
    return int(idx[np.argmax(Q.probs[idx])])


def exact_expected_length_positive(
    P: Distribution, alpha: float, epsilon: float
) -> float:
    """Exact expectation of the positive-error codeword length, no sampling.

    Always at most entropy(P) + log2(alpha) + log2(1/epsilon) + 1.
    """
    if alpha < 1:
        raise ValueError("closeness factor alpha must be >= 1")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must be in (0, 1]")
    p = P.probs[P.probs > 0]
    lengths = ceil_log2_array(alpha / (p * epsilon))
    return float(p @ lengths)


def positive_error_length_bound(P: Distribution, alpha: float, epsilon: float) -> float:
    """entropy(P) + log2(alpha) + log2(1/epsilon) + 1."""
    return entropy(P) + math.log2(alpha) + math.log2(1 / epsilon) + 1.0


def error_free_length_bound(P: Distribution, alpha: float) -> float:
    """entropy(P) + 2*log2(alpha) + 2."""
    return entropy(P) + 2 * math.log2(alpha) + 2.0
