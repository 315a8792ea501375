"""Acceptance gate: one test per criterion, each printing a [PASS]/[FAIL]
line with the measured numbers before asserting.

The Monte Carlo campaigns here are the expensive part of the suite (a few
minutes on one core); they are shared across criteria via module fixtures.
"""

import itertools
import math

import numpy as np
import pytest

from priorcode import (
    ExperimentConfig,
    InstanceSpec,
    StreamSeed,
    entropy,
    exact_expected_length_positive,
    hard_instance,
    min_closeness,
    one_to_one_optimal_length,
    positive_error_length_bound,
    run_experiment,
    sweep,
    validate_distribution,
)
from priorcode.cli import main as cli_main
from priorcode.core import LOG2_E
from priorcode.harness import ERROR_FREE, POSITIVE_ERROR, save_json
from priorcode.instances import MIN_HARD_ALPHA, random_close_pair

MASTER = "a1" * 32
ALPHA_GRID = [8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]
EPS_GRID = [0.1, 0.01]


def _report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", flush=True)
    assert ok, f"{name}: {detail}"


def _cfg(**kw):
    base = dict(
        scheme=ERROR_FREE,
        alpha=10.0,
        instance=InstanceSpec("hard"),
        trials=10_000,
        master_seed=MASTER,
    )
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.fixture(scope="module")
def ef_hard_campaign():
    """Error-free runs on the hard family across the alpha grid."""
    seed = StreamSeed(MASTER)
    out = {}
    for alpha in ALPHA_GRID:
        trials = 10_000 if alpha <= 128 else 3_000
        cfg = _cfg(
            alpha=alpha,
            trials=trials,
            master_seed=seed.derive(f"ef-hard:{alpha!r}".encode()).hex,
        )
        out[alpha] = run_experiment(cfg, keep_records=False)
    return out


@pytest.fixture(scope="module")
def ef_random_campaign():
    """Error-free runs on 200 random alpha-close pairs, up to 500 messages."""
    seed = StreamSeed(MASTER)
    size_rng = np.random.default_rng(seed.rng_int(b"sizes"))
    results = []
    for i in range(200):
        alpha = ALPHA_GRID[:5][i % 5]
        n = int(size_rng.integers(2, 501))
        cfg = _cfg(
            alpha=alpha,
            trials=10_000,
            instance=InstanceSpec("random", size=n),
            master_seed=seed.derive(f"ef-random:{i}".encode()).hex,
        )
        results.append(run_experiment(cfg, keep_records=False))
    return results


@pytest.fixture(scope="module")
def pe_campaign():
    """Positive-error runs on the hard family, full (alpha, epsilon) grid."""
    seed = StreamSeed(MASTER)
    out = {}
    for alpha in ALPHA_GRID:
        for eps in EPS_GRID:
            cfg = _cfg(
                scheme=POSITIVE_ERROR,
                alpha=alpha,
                epsilon=eps,
                trials=100_000,
                master_seed=seed.derive(f"pe-hard:{alpha!r}:{eps!r}".encode()).hex,
            )
            out[(alpha, eps)] = run_experiment(cfg, keep_records=False)
    return out


def test_criterion_1_error_free_never_misdecodes(ef_hard_campaign, ef_random_campaign):
    # run_experiment raises on any error-free decode failure, so reaching
    # this point already means zero misses; double-check the counters.
    runs = list(ef_hard_campaign.values()) + ef_random_campaign
    trials = sum(r.config.trials for r in runs)
    misses = sum(int(r.config.trials * r.summary.error_rate) for r in runs)
    _report(
        "criterion 1 (error-free decoding is always correct)",
        misses == 0,
        f"{misses} decode errors in {trials} trials "
        f"({len(ef_hard_campaign)} hard + {len(ef_random_campaign)} random instances)",
    )


def test_criterion_2_error_free_length_within_bound(ef_hard_campaign, ef_random_campaign):
    worst = -math.inf
    worst_desc = ""
    for r in list(ef_hard_campaign.values()) + ef_random_campaign:
        s = r.summary
        slack = (s.mean_length - s.length_ci99) - s.upper_bound
        if slack > worst:
            worst = slack
            worst_desc = (
                f"alpha={r.config.alpha} mean={s.mean_length:.3f} "
                f"ci={s.length_ci99:.3f} bound={s.upper_bound:.3f}"
            )
    _report(
        "criterion 2 (error-free mean length <= H + 2 log2 alpha + 2)",
        worst <= 0,
        f"worst (mean - CI) - bound = {worst:.4f} at {worst_desc}",
    )


def test_criterion_3_positive_error_exact_expectation_within_bound():
    worst = -math.inf
    cases = 0
    rng = np.random.default_rng(7)
    dists = []
    for alpha in ALPHA_GRID:
        inst = hard_instance(alpha, rng)
        dists.append((inst.P, alpha))
    for _ in range(20):
        n = int(rng.integers(1, 200))
        p = rng.dirichlet(np.ones(n) * rng.uniform(0.2, 4.0))
        dists.append((validate_distribution(p), float(rng.uniform(1.0, 500.0))))
    for (P, alpha), eps in itertools.product(dists, [0.5, 0.1, 0.01, 0.001]):
        gap = exact_expected_length_positive(P, alpha, eps) - positive_error_length_bound(
            P, alpha, eps
        )
        worst = max(worst, gap)
        cases += 1
    _report(
        "criterion 3 (exact expected positive-error length <= H + log2 alpha + log2(1/eps) + 1)",
        worst <= 1e-9,
        f"worst expectation - bound = {worst:.4f} over {cases} cases",
    )


def test_criterion_4_positive_error_monte_carlo(pe_campaign):
    worst_err = -math.inf
    worst_len = -math.inf
    for (alpha, eps), r in pe_campaign.items():
        s = r.summary
        sigma = math.sqrt(eps * (1 - eps) / r.config.trials)
        worst_err = max(worst_err, s.error_rate - (eps + 3 * sigma))
        worst_len = max(worst_len, (s.mean_length - s.length_ci99) - s.upper_bound)
    ok = worst_err <= 0 and worst_len <= 0
    _report(
        "criterion 4 (positive-error MC: error rate <= eps, length within bound)",
        ok,
        f"worst error-rate excess = {worst_err:.5f}, worst length excess = {worst_len:.4f} "
        f"over {len(pe_campaign)} grid points x 100000 trials",
    )


def _shortest_lengths(n):
    # lengths of the n shortest binary strings: 0, 1,1, 2,2,2,2, ...
    return [(i + 1).bit_length() - 1 for i in range(n)]


def _brute_force_ell(probs):
    n = len(probs)
    lens = _shortest_lengths(n)
    best = math.inf
    for perm in itertools.permutations(range(n)):
        best = min(best, sum(probs[i] * lens[perm[i]] for i in range(n)))
    return best


def test_criterion_5_one_to_one_length_matches_bruteforce():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        p = rng.dirichlet(np.ones(n) * rng.uniform(0.3, 3.0))
        got = one_to_one_optimal_length(validate_distribution(p))
        worst = max(worst, abs(got - _brute_force_ell(list(p))))
    _report(
        "criterion 5 (one-to-one optimal length matches exhaustive search, |M| <= 8)",
        worst <= 1e-12,
        f"max |difference| = {worst:.2e} over 200 random distributions",
    )


def test_criterion_6_entropy_gap_bound():
    rng = np.random.default_rng(13)
    worst = -math.inf
    for _ in range(1000):
        n = int(rng.integers(1, 80))
        p = rng.dirichlet(np.ones(n) * rng.uniform(0.1, 5.0))
        P = validate_distribution(p)
        h, ell = entropy(P), one_to_one_optimal_length(P)
        worst = max(worst, (h - ell) - (math.log2(ell + 1) + LOG2_E))
    _report(
        "criterion 6 (H - ell <= log2(ell + 1) + log2 e)",
        worst <= 1e-9,
        f"worst gap excess = {worst:.4f} over 1000 random distributions",
    )


def test_criterion_7_hard_instances_are_valid():
    rng = np.random.default_rng(17)
    ok = True
    details = []
    for alpha in ALPHA_GRID + [MIN_HARD_ALPHA, 20.0]:
        inst = hard_instance(alpha, rng)
        a_star = min_closeness(inst.P, inst.Q).alpha_star
        h = entropy(inst.P)
        good = (
            a_star <= alpha * (1 + 1e-9)
            and abs(inst.P.probs.sum() - 1) <= 1e-9
            and abs(inst.Q.probs.sum() - 1) <= 1e-9
            and np.all(inst.Q.probs > 0)
            and h <= 3.5
        )
        ok = ok and good
        if not good:
            details.append(f"alpha={alpha}: alpha*={a_star:.3f} H={h:.3f}")
    _report(
        "criterion 7 (hard instances: valid priors, closeness <= alpha, low entropy)",
        ok,
        "all alpha grid points valid" if ok else "; ".join(details),
    )


def test_criterion_8_redundancy_growth(ef_hard_campaign):
    # error-free: measured redundancy should grow like 2 log2(alpha) minus
    # lower-order terms, so the fitted slope in log2(alpha) lands below 2
    alphas = [a for a in ALPHA_GRID if a >= 16]
    x = np.log2(alphas)
    y = [
        ef_hard_campaign[a].summary.mean_length - ef_hard_campaign[a].summary.ell_P
        for a in alphas
    ]
    ef_slope = float(np.polyfit(x, y, 1)[0])
    ef_ok = 1.5 <= ef_slope <= 2.2

    # positive-error: exact expected length grows one bit per doubling of
    # alpha, i.e. log2(10) =~ 3.32 bits per decade
    eps = 0.1

    def pe_len(alpha):
        inst = hard_instance(alpha, np.random.default_rng(0))
        return exact_expected_length_positive(inst.P, alpha, eps)

    a_lo, a_hi = 10**1.5, 10**2.5
    pe_slope = pe_len(a_hi) - pe_len(a_lo)
    pe_ok = abs(pe_slope - math.log2(10)) <= 0.7
    _report(
        "criterion 8 (redundancy growth rates in alpha)",
        ef_ok and pe_ok,
        f"error-free slope {ef_slope:.3f} per log2(alpha) (expected in [1.5, 2.2]); "
        f"positive-error slope {pe_slope:.3f} bits/decade (expected ~3.32 +/- 0.7)",
    )


def test_criterion_9_reproducibility(tmp_path, capsys):
    cfg_doc = {
        "scheme": "error_free",
        "alpha": 16.0,
        "instance": {"kind": "hard"},
        "trials": 200,
        "master_seed": MASTER,
    }
    cfg_path = str(tmp_path / "cfg.json")
    save_json(cfg_doc, cfg_path)

    outs = []
    for _ in range(2):
        assert cli_main(["experiment", "--config", cfg_path]) == 0
        outs.append(capsys.readouterr().out)
    stdout_same = outs[0] == outs[1]

    recs = []
    for tag in ["a", "b"]:
        out_dir = str(tmp_path / tag)
        run_experiment(
            ExperimentConfig.from_dict(cfg_doc).replaced(output_path=out_dir)
        )
        with open(f"{out_dir}/records.csv", "rb") as f:
            recs.append(f.read())
    records_same = recs[0] == recs[1]

    sweeps = []
    base = ExperimentConfig.from_dict(cfg_doc)
    for _ in range(2):
        rows = sweep(base, [8.0, 16.0])
        sweeps.append(rows)
    sweep_same = sweeps[0] == sweeps[1]

    _report(
        "criterion 9 (same master seed reproduces outputs byte for byte)",
        stdout_same and records_same and sweep_same,
        f"experiment stdout identical: {stdout_same}, trial CSV identical: "
        f"{records_same}, sweep rows identical: {sweep_same}",
    )
