"""
Hard prior pairs and the length bounds
======================================

The hard family concentrates the sender prior on one message while the
receiver prior spreads its mass over a small decoy set, so any scheme has
to spend roughly 2*log2(alpha) extra bits even though the entropy is tiny.
"""

import math

import numpy as np

from priorcode import (
    entropy,
    error_free_length_bound,
    exact_expected_length_positive,
    hard_instance,
    largest_k,
    min_closeness,
    one_to_one_optimal_length,
    positive_error_length_bound,
)

rng = np.random.default_rng(42)

for alpha in [8.0, 16.0, 64.0, 256.0, 1024.0]:
    inst = hard_instance(alpha, rng)
    P, Q = inst.P, inst.Q
    h = entropy(P)
    ell = one_to_one_optimal_length(P)
    a_star = min_closeness(P, Q).alpha_star
    print(f"alpha = {alpha:6.0f}: k = {largest_k(alpha):3d}, |M| = {P.size:5d}")
    print(f"    closeness alpha* = {a_star:8.3f} (<= alpha by construction)")
    print(f"    H(P) = {h:.3f}, one-to-one optimum ell(P) = {ell:.3f}")
    print(f"    error-free bound   H + 2 log2(alpha) + 2        = "
          f"{error_free_length_bound(P, alpha):7.3f}")
    eps = 0.01
    print(f"    positive-error(eps={eps}) exact E[len] = "
          f"{exact_expected_length_positive(P, alpha, eps):7.3f}  "
          f"(bound {positive_error_length_bound(P, alpha, eps):7.3f})")

# the entropy stays bounded while both bounds grow with log2(alpha):
# the redundancy over ell(P) is the whole story for this family
print("\nnote: H(P) stays below", round(max(
    entropy(hard_instance(a, rng).P) for a in [8.0, 1024.0]), 3),
    "bits while the bounds keep growing")
