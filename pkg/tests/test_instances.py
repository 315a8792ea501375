import math

import numpy as np
import pytest

from priorcode import (
    InstanceConstructionError,
    entropy,
    hard_instance,
    largest_k,
    min_closeness,
    one_to_one_optimal_length,
    random_close_pair,
)
from priorcode.instances import MIN_HARD_ALPHA, hard_instance_entropy


def test_largest_k_examples():
    assert largest_k(10.0) == 6
    assert largest_k(20.0) == 10
    assert largest_k(2.0) == 2
    with pytest.raises(ValueError):
        largest_k(1.9)


def test_largest_k_is_maximal():
    for alpha in [2.0, 5.0, 10.0, 64.0, 1000.0]:
        k = largest_k(alpha)
        assert k * math.sqrt(math.log2(k)) <= alpha
        kk = k + 1
        assert kk * math.sqrt(math.log2(kk)) > alpha


def test_hard_instance_k6_closed_form():
    rng = np.random.default_rng(0)
    inst = hard_instance(10.0, rng)
    k = inst.k
    assert k == 6
    L = math.log2(k)
    n = k * k + 1
    assert inst.P.size == n and inst.Q.size == n
    m = inst.distinguished_m
    assert inst.P.p(m) == pytest.approx(1 - 1 / L, rel=1e-12)
    assert inst.P.p(m) == pytest.approx(0.61315, abs=1e-5)
    others = [inst.P.p(i) for i in range(n) if i != m]
    assert all(v == pytest.approx(1 / (k * k * L), rel=1e-12) for v in others)
    assert others[0] == pytest.approx(0.0107457, abs=1e-6)
    # Q: 1/(k sqrt(log2 k)) on the distinguished set, uniform leftover outside
    s = set(inst.S)
    assert m in s and len(s) == k + 1
    q_in = 1 / (k * math.sqrt(L))
    for i in range(n):
        if i in s:
            assert inst.Q.p(i) == pytest.approx(q_in, rel=1e-12)
    outside = [inst.Q.p(i) for i in range(n) if i not in s]
    leftover = (1 - (k + 1) * q_in) / (n - k - 1)
    assert all(v == pytest.approx(leftover, rel=1e-12) for v in outside)
    assert leftover > 0


def test_hard_instance_closeness_and_entropy():
    rng = np.random.default_rng(1)
    for alpha in [6.0, 10.0, 20.0, 100.0]:
        inst = hard_instance(alpha, rng)
        k = inst.k
        expected_alpha = k * math.sqrt(math.log2(k))
        rep = min_closeness(inst.P, inst.Q)
        assert rep.alpha_star == pytest.approx(expected_alpha, rel=1e-9)
        assert rep.alpha_star <= alpha * (1 + 1e-12)
        assert entropy(inst.P) == pytest.approx(hard_instance_entropy(k), rel=1e-12)


def test_hard_instance_entropy_closed_form():
    k = 6
    L = math.log2(k)
    p0 = 1 - 1 / L
    po = 1 / (k * k * L)
    h = -p0 * math.log2(p0) - k * k * po * math.log2(po)
    assert hard_instance_entropy(k) == pytest.approx(h, rel=1e-12)
    assert h == pytest.approx(2.9628, abs=1e-4)


def test_hard_instance_ell_value():
    inst = hard_instance(10.0, np.random.default_rng(2))
    assert one_to_one_optimal_length(inst.P) == pytest.approx(1.3755, abs=1e-4)


def test_hard_instance_requires_large_enough_alpha():
    # k must be at least 4, otherwise Q's outside mass would go negative
    with pytest.raises(InstanceConstructionError):
        hard_instance(5.0, np.random.default_rng(3))
    assert MIN_HARD_ALPHA == pytest.approx(4 * math.sqrt(2))
    inst = hard_instance(MIN_HARD_ALPHA, np.random.default_rng(3))
    assert inst.k == 4
    assert np.all(inst.Q.probs > 0)


def test_hard_instance_valid_for_many_alphas():
    rng = np.random.default_rng(4)
    for alpha in np.linspace(MIN_HARD_ALPHA, 300.0, 25):
        inst = hard_instance(float(alpha), rng)
        assert inst.P.probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert inst.Q.probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(inst.P.probs > 0) and np.all(inst.Q.probs > 0)
        assert min_closeness(inst.P, inst.Q).alpha_star <= alpha * (1 + 1e-9)


def test_hard_instance_deterministic_given_rng():
    a = hard_instance(20.0, np.random.default_rng(5))
    b = hard_instance(20.0, np.random.default_rng(5))
    assert a.distinguished_m == b.distinguished_m
    assert a.S == b.S
    assert np.array_equal(a.P.probs, b.P.probs)
    assert np.array_equal(a.Q.probs, b.Q.probs)


def test_hard_instance_randomizes_placement():
    ms = {hard_instance(20.0, np.random.default_rng(s)).distinguished_m for s in range(20)}
    assert len(ms) > 1


def test_random_close_pair_properties():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        alpha = float(rng.uniform(1.0, 50.0))
        n = int(rng.integers(1, 60))
        P, Q = random_close_pair(alpha, n, rng)
        assert P.size == n and Q.size == n
        assert P.probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert Q.probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert min_closeness(P, Q).alpha_star <= alpha * (1 + 1e-9)


def test_random_close_pair_alpha_one_returns_equal():
    rng = np.random.default_rng(7)
    P, Q = random_close_pair(1.0, 5, rng)
    assert np.array_equal(P.probs, Q.probs)
    P1, Q1 = random_close_pair(3.0, 1, rng)
    assert P1.probs[0] == 1.0 and Q1.probs[0] == 1.0


def test_random_close_pair_rejects_bad_args():
    rng = np.random.default_rng(8)
    with pytest.raises(ValueError):
        random_close_pair(0.5, 5, rng)
    with pytest.raises(ValueError):
        random_close_pair(2.0, 0, rng)


def test_random_close_pair_deterministic_given_rng():
    a = random_close_pair(5.0, 10, np.random.default_rng(9))
    b = random_close_pair(5.0, 10, np.random.default_rng(9))
    assert np.array_equal(a[0].probs, b[0].probs)
    assert np.array_equal(a[1].probs, b[1].probs)
