"""Generators for worst-case prior pairs and for random alpha-close pairs.

The hard family lives on k^2+1 messages, where k is the largest integer with
k*sqrt(log2(k)) <= alpha.  The sender's prior piles mass 1 - 1/log2(k) on one
distinguished message; the receiver's prior spreads its mass over a set S of
k+1 messages containing the distinguished one.  These pairs are alpha-close,
have O(1) sender entropy, and force long codewords.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Distribution, min_closeness, validate_distribution
from .errors import InstanceConstructionError

# k = 3 would give the receiver's prior negative mass outside S under base-2
# logs ((k+1)/(k*sqrt(log2 k)) > 1), so the generator requires k >= 4, i.e.
# alpha >= 4*sqrt(2).
MIN_HARD_K = 4
MIN_HARD_ALPHA = 4.0 * math.sqrt(2.0)

# Float slack for re-checking constructive closeness guarantees.
_CLOSENESS_SLOP = 1e-9


@dataclass(frozen=True)
class HardInstance:
    alpha: float
    k: int
    P: Distribution
    Q: Distribution
    distinguished_m: int
    S: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.k * self.k + 1


def largest_k(alpha: float) -> int:
    """max{k >= 2 : k * sqrt(log2 k) <= alpha}."""
    if alpha < 2:
        raise InstanceConstructionError(
            f"alpha={alpha} < 2; no k >= 2 satisfies k*sqrt(log2 k) <= alpha"
        )
    k = 2
    while (k + 1) * math.sqrt(math.log2(k + 1)) <= alpha:
        k += 1
    return k


def hard_instance(alpha: float, rng: np.random.Generator) -> HardInstance:
    """Sample one hard prior pair: uniform distinguished message, uniform S.

    Closeness is re-verified numerically on the constructed pair rather than
    trusted from the asymptotic argument.
    """
    k = largest_k(alpha)
    if k < MIN_HARD_K:
        raise InstanceConstructionError(
            f"alpha={alpha} gives k={k} < {MIN_HARD_K}; need alpha >= "
            f"{MIN_HARD_ALPHA:.4f} so the receiver prior has positive mass "
            "outside S"
        )
    L = math.log2(k)
    n = k * k + 1
    m = int(rng.integers(n))
    pool = np.delete(np.arange(n), m)
    extra = rng.choice(pool, size=k, replace=False)
    S = tuple(sorted([m, *extra.tolist()]))

    p = np.full(n, 1.0 / (k * k * L))
    p[m] = 1.0 - 1.0 / L
    q = np.full(n, (1.0 - (k + 1) / (k * math.sqrt(L))) / (k * k - k))
    q[list(S)] = 1.0 / (k * math.sqrt(L))

    P = validate_distribution(p)
    Q = validate_distribution(q)
    report = min_closeness(P, Q)
    if not report.alpha_star <= alpha * (1.0 + _CLOSENESS_SLOP):
        raise InstanceConstructionError(
            f"constructed pair has closeness {report.alpha_star} > alpha={alpha}"
        )
    return HardInstance(float(alpha), k, P, Q, m, S)


def hard_instance_entropy(k: int) -> float:
    """Closed-form sender entropy of the hard family at parameter k."""
    L = math.log2(k)
    return (1 - 1 / L) * math.log2(1 / (1 - 1 / L)) + (1 / L) * (2 * L + math.log2(L))


def random_close_pair(
    alpha: float, n: int, rng: np.random.Generator
) -> tuple[Distribution, Distribution]:
    """A uniformly random simplex point Q and a multiplicative perturbation P.

    Each weight is drawn from [1/sqrt(alpha), sqrt(alpha)], so after
    normalization the pair is alpha-close by construction, not just
    statistically; the guarantee is still re-checked.
    """
    if n < 1:
        raise InstanceConstructionError("message count must be >= 1")
    if alpha < 1:
        raise InstanceConstructionError("alpha must be >= 1")
    q = rng.dirichlet(np.ones(n))
    Q = validate_distribution(q / q.sum())
    if alpha == 1 or n == 1:
        return Q, Q
    root = math.sqrt(alpha)
    w = rng.uniform(1.0 / root, root, size=n)
    p = Q.probs * w
    P = validate_distribution(p / p.sum())
    report = min_closeness(P, Q)
    if not report.alpha_star <= alpha * (1.0 + _CLOSENESS_SLOP):
        raise InstanceConstructionError(
            f"perturbed pair has closeness {report.alpha_star} > alpha={alpha}"
        )
    return P, Q
