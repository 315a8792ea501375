"""Fused per-trial kernels for the Monte Carlo harness.

These reproduce, bit for bit, what the scalar codec functions in
:mod:`priorcode.codecs` compute, but run the whole trial loop inside one
compiled function: no intermediate (trials x messages) matrices, and the
decoder scans candidates in receiver-likelihood order so it can stop at the
first match.  When numba is unavailable the harness falls back to its
vectorized numpy path; a unit test pins all paths to identical output.
"""

from __future__ import annotations

import numpy as np

from .randomness import STREAM_BIT_CAP

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a soft dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_U64 = np.uint64
_PHI = _U64(0x9E3779B97F4A7C15)
_MUL1 = _U64(0xBF58476D1CE4E5B9)
_MUL2 = _U64(0x94D049BB133111EB)
_ZERO = _U64(0)
_MAX_BLOCKS = STREAM_BIT_CAP // 64


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _U64(30))) * _MUL1
    z = (z ^ (z >> _U64(27))) * _MUL2
    return z ^ (z >> _U64(31))


@njit(cache=True, inline="always")
def _block(w0, w1, w2, w3, m, j):
    z = _mix((m * _PHI + j) ^ w0)
    z = _mix(z + w1)
    z = _mix(z + w2)
    return z ^ w3


@njit(cache=True, inline="always")
def _clz(x):
    # leading zeros of a nonzero uint64
    n = 0
    if (x >> _U64(32)) == _ZERO:
        n += 32
        x = x << _U64(32)
    if (x >> _U64(48)) == _ZERO:
        n += 16
        x = x << _U64(16)
    if (x >> _U64(56)) == _ZERO:
        n += 8
        x = x << _U64(8)
    if (x >> _U64(60)) == _ZERO:
        n += 4
        x = x << _U64(4)
    if (x >> _U64(62)) == _ZERO:
        n += 2
        x = x << _U64(2)
    if (x >> _U64(63)) == _ZERO:
        n += 1
    return n


@njit(cache=True)
def _lcp(w0, w1, w2, w3, a, b):
    """Common prefix length of the streams for messages a and b; -1 if it
    would exceed the per-stream cap."""
    j = 0
    total = 0
    while j < _MAX_BLOCKS:
        x = _block(w0, w1, w2, w3, a, _U64(j)) ^ _block(w0, w1, w2, w3, b, _U64(j))
        if x != _ZERO:
            return total + _clz(x)
        total += 64
        j += 1
    return -1


@njit(cache=True)
def _matches(w0, w1, w2, w3, mm, own0, m, L):
    """Does the stream for mm share the first L bits of the stream for m?
    own0 is m's block 0, precomputed by the caller."""
    if L == 0:
        return True
    b = _block(w0, w1, w2, w3, mm, _ZERO)
    if L <= 64:
        sh = _U64(64 - L)
        return (b >> sh) == (own0 >> sh)
    if b != own0:
        return False
    rem = L - 64
    j = 1
    while rem > 0:
        bm = _block(w0, w1, w2, w3, m, _U64(j))
        bo = _block(w0, w1, w2, w3, mm, _U64(j))
        if rem >= 64:
            if bm != bo:
                return False
        else:
            sh = _U64(64 - rem)
            if (bm >> sh) != (bo >> sh):
                return False
        rem -= 64
        j += 1
    return True


@njit(cache=True)
def _decode(w0, w1, w2, w3, q_order, own0, m, L):
    """First message in receiver-likelihood order whose stream starts with
    the transmitted prefix (argmax Q with lowest-index tie break)."""
    for pos in range(q_order.shape[0]):
        mm = q_order[pos]
        if _matches(w0, w1, w2, w3, _U64(mm), own0, m, L):
            return mm
    return -1  # unreachable with matching seeds: m itself always matches


@njit(cache=True)
def ef_trials(tw, msgs, p, alpha, q_order, lengths, decoded, bits_read):
    """Error-free encode + decode for every trial.

    Returns 0, or the index of a trial whose minimal separating prefix
    exceeded the stream cap (flagged with length -1).
    """
    n = p.shape[0]
    bad = 0
    for t in range(msgs.shape[0]):
        w0, w1, w2, w3 = tw[t, 0], tw[t, 1], tw[t, 2], tw[t, 3]
        m = msgs[t]
        mu = _U64(m)
        thr = p[m] / (alpha * alpha)
        own0 = _block(w0, w1, w2, w3, mu, _ZERO)
        maxlcp = -1
        br = 0
        capped = False
        for mm in range(n):
            if mm == m or p[mm] < thr:
                continue
            x = _block(w0, w1, w2, w3, _U64(mm), _ZERO) ^ own0
            if x != _ZERO:
                lcp = _clz(x)
            else:
                lcp = _lcp(w0, w1, w2, w3, mu, _U64(mm))
                if lcp < 0:
                    capped = True
                    break
            br += lcp + 1
            if lcp > maxlcp:
                maxlcp = lcp
        if capped or maxlcp + 1 > STREAM_BIT_CAP:
            lengths[t] = -1
            bad = t
            continue
        L = maxlcp + 1 if maxlcp >= 0 else 0
        lengths[t] = L
        bits_read[t] = br + L
        decoded[t] = _decode(w0, w1, w2, w3, q_order, own0, mu, L)
    return bad


@njit(cache=True)
def pe_trials(tw, msgs, plen, q_order, lengths, decoded):
    """Positive-error encode + decode for every trial."""
    for t in range(msgs.shape[0]):
        w0, w1, w2, w3 = tw[t, 0], tw[t, 1], tw[t, 2], tw[t, 3]
        m = msgs[t]
        mu = _U64(m)
        L = plen[m]
        own0 = _block(w0, w1, w2, w3, mu, _ZERO)
        lengths[t] = L
        decoded[t] = _decode(w0, w1, w2, w3, q_order, own0, mu, L)
    return 0
