"""Finite probability distributions and the quantities built on them.

Everything is in bits (base-2 logs).  Conventions: 0*log(1/0) := 0 and the
0/0 probability ratio := 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDistributionError

SUM_TOLERANCE = 1e-9
LOG2_E = math.log2(math.e)


@dataclass(frozen=True)
class MessageSet:
    """An indexed set of messages 0..size-1, optionally labeled."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise InvalidDistributionError("message set must be nonempty")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise InvalidDistributionError(
                    f"{len(self.labels)} labels for {self.size} messages"
                )
            if len(set(self.labels)) != self.size:
                raise InvalidDistributionError("labels must be unique")


@dataclass(frozen=True, eq=False)
class Distribution:
    """A validated probability vector over a MessageSet."""

    message_set: MessageSet
    probs: np.ndarray

    @property
    def size(self) -> int:
        return self.message_set.size

    def p(self, m: int) -> float:
        return float(self.probs[m])


def validate_distribution(probs, labels=None) -> Distribution:
    """Build a Distribution, rejecting anything out of contract.

    Probabilities are never renormalized silently: the sum must already be
    within SUM_TOLERANCE of 1.
    """
    arr = np.asarray(probs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidDistributionError("probs must be a nonempty 1-D sequence")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise InvalidDistributionError("probabilities must be finite and >= 0")
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise InvalidDistributionError(
            f"probabilities sum to {total!r}, outside tolerance {SUM_TOLERANCE}"
        )
    ms = MessageSet(arr.size, tuple(labels) if labels is not None else None)
    arr = arr.copy()
    arr.setflags(write=False)
    return Distribution(ms, arr)


def entropy(P: Distribution) -> float:
    """H(P) = sum_m P(m) log2(1/P(m)) in bits; zero terms are dropped."""
    p = P.probs[P.probs > 0]
    return max(0.0, float(-(p * np.log2(p)).sum()))


@dataclass(frozen=True)
class ClosenessReport:
    """Smallest closeness factor for a pair of priors and where it is attained.

    alpha_star is +inf when some message has probability 0 in exactly one of
    the two distributions.
    """

    alpha_star: float
    witness_index: int

    @property
    def finite(self) -> bool:
        return math.isfinite(self.alpha_star)


def _check_same_message_set(P: Distribution, Q: Distribution):
    if P.size != Q.size:
        raise InvalidDistributionError("distributions are over different message sets")


def min_closeness(P: Distribution, Q: Distribution) -> ClosenessReport:
    """Smallest alpha >= 1 such that Q(m)/alpha <= P(m) <= alpha*Q(m) for all m.

    Symmetric in P and Q.  The 0/0 ratio counts as 1; a one-sided zero makes
    the pair alpha-close for no finite alpha.
    """
    _check_same_message_set(P, Q)
    p, q = P.probs, Q.probs
    ratio = np.ones(P.size)
    one_zero = (p == 0) ^ (q == 0)
    ratio[one_zero] = np.inf
    both = (p > 0) & (q > 0)
    ratio[both] = np.maximum(p[both] / q[both], q[both] / p[both])
    witness = int(np.argmax(ratio))
    return ClosenessReport(float(ratio[witness]), witness)


def relative_entropy(P: Distribution, Q: Distribution) -> float:
    """Sum over P(m)>0 of P(m) log2(P(m)/Q(m)), in bits."""
    _check_same_message_set(P, Q)
    p, q = P.probs, Q.probs
    support = p > 0
    if np.any(support & (q == 0)):
        raise InvalidDistributionError(
            "relative entropy undefined: P puts mass where Q has none"
        )
    ps, qs = p[support], q[support]
    return float((ps * np.log2(ps / qs)).sum())


def code_length_profile(n: int) -> np.ndarray:
    """Lengths of the n shortest binary strings, shortest first.

    Enumeration starts with the empty string, so the i-th string (1-indexed)
    has length floor(log2(i)).
    """
    return np.array([i.bit_length() - 1 for i in range(1, n + 1)], dtype=float)


def one_to_one_optimal_length(P: Distribution) -> float:
    """Expected length of the best injective (not prefix-free) code for P.

    The i-th most probable message gets the i-th shortest binary string;
    ties in the probability sort are broken by ascending index (the value is
    tie-invariant, this only fixes a canonical assignment).
    """
    n = P.size
    order = np.lexsort((np.arange(n), -P.probs))
    return float(P.probs[order] @ code_length_profile(n))
