"""Monte Carlo experiment driver, redundancy measurement and file formats.

Every trial derives a fresh stream seed from the experiment's master seed and
the trial index, samples a message from the sender prior, encodes with the
configured scheme and decodes with the receiver prior.  Everything downstream
of the master seed is deterministic, so reruns produce byte-identical output
files.

The trial loop is vectorized: the first 64-bit block of every message's
stream for a chunk of trials is produced as one matrix, which covers all
realistic codeword lengths; the rare trial that needs more than 64 bits falls
back to the scalar codec functions (and a unit test pins the two paths to
identical results).
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .codecs import (
    Codeword,
    ceil_log2_array,
    decode_max_q,
    encode_error_free,
    encode_positive_error,
    error_free_length_bound,
    positive_error_length_bound,
)
from .core import Distribution, entropy, one_to_one_optimal_length, validate_distribution
from . import _kernels
from .errors import ConfigError, ContractViolationError
from .instances import HardInstance, hard_instance, largest_k, random_close_pair
from .randomness import MASK64, BitPrefix, StreamSeed, bit_length_u64, raw_blocks, trial_words

_U64 = np.uint64

ERROR_FREE = "error_free"
POSITIVE_ERROR = "positive_error"

# 99% two-sided normal quantile; the statistical methodology is ours, the
# guarantees being measured are exact.
Z99 = 2.5758293035489004

# Elementwise budget per vectorized chunk (keeps peak memory ~100 MB).
_CHUNK_ELEMS = 1 << 21

SWEEP_COLUMNS = [
    "alpha",
    "epsilon",
    "scheme",
    "k",
    "entropy",
    "ell_P",
    "mean_length",
    "length_ci99",
    "error_rate",
    "redundancy",
    "upper_bound",
]


@dataclass(frozen=True)
class InstanceSpec:
    kind: str  # "hard" | "random" | "file"
    size: int | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("hard", "random", "file"):
            raise ConfigError(f"unknown instance kind {self.kind!r}")
        if self.kind == "random" and (self.size is None or self.size < 1):
            raise ConfigError("random instances need a positive size")
        if self.kind == "file" and not self.path:
            raise ConfigError("file instances need a path")


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str
    alpha: float
    instance: InstanceSpec
    trials: int
    master_seed: str
    epsilon: float | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.scheme not in (ERROR_FREE, POSITIVE_ERROR):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.scheme == POSITIVE_ERROR:
            if self.epsilon is None or not 0 < self.epsilon <= 1:
                raise ConfigError("positive_error requires epsilon in (0, 1]")
        elif self.epsilon is not None:
            raise ConfigError("epsilon is only meaningful for positive_error")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.alpha < 1:
            raise ConfigError("alpha must be >= 1")
        StreamSeed(self.master_seed)  # validates the hex

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        try:
            inst = doc["instance"]
            spec = InstanceSpec(
                inst["kind"], inst.get("size"), inst.get("path")
            )
            return cls(
                scheme=doc["scheme"],
                alpha=float(doc["alpha"]),
                instance=spec,
                trials=int(doc["trials"]),
                master_seed=doc["master_seed"],
                epsilon=(None if doc.get("epsilon") is None else float(doc["epsilon"])),
                output_path=doc.get("output_path"),
            )
        except KeyError as exc:
            raise ConfigError(f"config missing field {exc}") from exc

    def to_dict(self) -> dict:
        inst: dict = {"kind": self.instance.kind}
        if self.instance.size is not None:
            inst["size"] = self.instance.size
        if self.instance.path is not None:
            inst["path"] = self.instance.path
        doc = {
            "scheme": self.scheme,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "instance": inst,
            "trials": self.trials,
            "master_seed": self.master_seed,
        }
        if self.output_path is not None:
            doc["output_path"] = self.output_path
        return doc

    def replaced(self, **changes) -> "ExperimentConfig":
        doc = self.to_dict()
        inst = doc.pop("instance")
        spec = InstanceSpec(inst["kind"], inst.get("size"), inst.get("path"))
        doc["instance"] = spec
        doc.pop("output_path", None)
        doc["output_path"] = self.output_path
        doc.update(changes)
        return ExperimentConfig(**doc)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    message: int
    codeword_length: int
    decoded: int
    success: bool
    stream_bits_read: int


@dataclass(frozen=True)
class SummaryStats:
    mean_length: float
    length_ci99: float
    error_rate: float
    error_rate_ci: float
    entropy: float
    ell_P: float
    redundancy: float
    upper_bound: float
    lower_bound_reference: float | None

    def to_dict(self) -> dict:
        return {
            "mean_length": self.mean_length,
            "length_ci99": self.length_ci99,
            "error_rate": self.error_rate,
            "error_rate_ci": self.error_rate_ci,
            "entropy": self.entropy,
            "ell_P": self.ell_P,
            "redundancy": self.redundancy,
            "upper_bound": self.upper_bound,
            "lower_bound_reference": self.lower_bound_reference,
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    P: Distribution
    Q: Distribution
    meta: dict
    summary: SummaryStats
    records: list[TrialRecord] = field(default_factory=list)
    # raw arrays, always present even when records aren't materialized
    lengths: np.ndarray | None = None
    successes: np.ndarray | None = None


def lower_bound_reference(scheme: str, alpha: float, epsilon: float | None):
    """Asymptotic reference curve; the unknown additive constant is set to 0."""
    if alpha <= 2:
        return None
    loglog = math.log2(math.log2(alpha))
    if scheme == ERROR_FREE:
        return 2 * math.log2(alpha) - 3 * loglog
    return math.log2(alpha) + math.log2(1 / epsilon) - 4.5 * loglog


def build_instance(config: ExperimentConfig, seed: StreamSeed):
    """Materialize (P, Q, meta) for the configured instance."""
    rng = np.random.default_rng(seed.rng_int(b"instance"))
    if config.instance.kind == "hard":
        inst = hard_instance(config.alpha, rng)
        meta = {
            "kind": "hard",
            "alpha": inst.alpha,
            "k": inst.k,
            "distinguished_m": inst.distinguished_m,
            "S": list(inst.S),
        }
        return inst.P, inst.Q, meta
    if config.instance.kind == "random":
        P, Q = random_close_pair(config.alpha, config.instance.size, rng)
        return P, Q, {"kind": "random", "alpha": config.alpha, "size": config.instance.size}
    doc = load_json(config.instance.path)
    P, Q = instance_pair_from_doc(doc)
    meta = doc.get("meta", {"kind": "file", "path": config.instance.path})
    return P, Q, meta


def _trial_inputs(P, Q, trials, seed):
    n = P.size
    p = P.probs
    msg_rng = np.random.default_rng(seed.rng_int(b"messages"))
    msgs = msg_rng.choice(n, size=trials, p=p / p.sum())
    tw = trial_words(seed, trials)
    q_order = np.lexsort((np.arange(n), -Q.probs))
    return msgs, tw, q_order


def _positive_error_lengths(p, alpha, epsilon):
    plen = np.zeros(p.size, dtype=np.int64)
    pos = p > 0
    plen[pos] = ceil_log2_array(alpha / (p[pos] * epsilon))
    return plen


def _simulate(P, Q, scheme, alpha, epsilon, trials, seed, engine="auto"):
    """Trial loop; returns (messages, lengths, decoded, bits_read).

    engine: "auto" (numba when available), "numba" or "numpy".  Both
    backends produce identical output.
    """
    if engine == "auto":
        engine = "numba" if _kernels.HAVE_NUMBA else "numpy"
    if engine == "numba":
        return _simulate_numba(P, Q, scheme, alpha, epsilon, trials, seed)
    return _simulate_numpy(P, Q, scheme, alpha, epsilon, trials, seed)


def _simulate_numba(P, Q, scheme, alpha, epsilon, trials, seed):
    from .errors import StreamCapExceededError
    from .randomness import STREAM_BIT_CAP

    msgs, tw, q_order = _trial_inputs(P, Q, trials, seed)
    lengths = np.zeros(trials, dtype=np.int64)
    decoded = np.zeros(trials, dtype=np.int64)
    bits_read = np.zeros(trials, dtype=np.int64)
    if scheme == ERROR_FREE:
        _kernels.ef_trials(
            tw, msgs, P.probs, float(alpha), q_order, lengths, decoded, bits_read
        )
        if np.any(lengths < 0):
            raise StreamCapExceededError(
                "minimal separating prefix exceeds the per-stream cap"
            )
    else:
        plen = _positive_error_lengths(P.probs, alpha, epsilon)
        if int(plen[msgs].max()) > STREAM_BIT_CAP:
            raise StreamCapExceededError(
                "positive-error codeword length exceeds the per-stream cap"
            )
        _kernels.pe_trials(tw, msgs, plen, q_order, lengths, decoded)
        bits_read = lengths.copy()
    return msgs, lengths, decoded, bits_read


def _simulate_numpy(P, Q, scheme, alpha, epsilon, trials, seed):
    """Vectorized reference backend (chunked matrices of stream blocks)."""
    n = P.size
    p = P.probs
    msgs, tw, q_order = _trial_inputs(P, Q, trials, seed)
    all_m = np.arange(n, dtype=np.uint64)

    lengths = np.zeros(trials, dtype=np.int64)
    decoded = np.zeros(trials, dtype=np.int64)
    bits_read = np.zeros(trials, dtype=np.int64)

    if scheme == POSITIVE_ERROR:
        plen = _positive_error_lengths(p, alpha, epsilon)

    chunk = max(1, _CHUNK_ELEMS // n)
    for start in range(0, trials, chunk):
        stop = min(start + chunk, trials)
        rows = np.arange(start, stop)
        m_r = msgs[rows]
        c = m_r.size
        w = tw[rows]
        B = raw_blocks(
            w[:, 0:1], w[:, 1:2], w[:, 2:3], w[:, 3:4], all_m[None, :], _U64(0)
        )
        own = B[np.arange(c), m_r]

        if scheme == ERROR_FREE:
            comp = p[None, :] >= (p[m_r] / (alpha * alpha))[:, None]
            comp[np.arange(c), m_r] = False
            x = np.where(comp, B ^ own[:, None], MASK64)
            lcp = 64 - bit_length_u64(x)
            br = ((lcp + 1) * comp).sum(axis=1)
            has = comp.any(axis=1)
            xmin = x.min(axis=1)
            L = np.where(has, 65 - bit_length_u64(xmin), 0)
            fallback = has & (xmin == 0)  # some competitor agrees on 64+ bits
            br = br + L
        else:
            L = plen[m_r]
            br = L.copy()
            fallback = L > 64

        ok = ~fallback
        Lok = np.minimum(L, 64)
        shift = np.where(L > 0, 64 - Lok, 0).astype(np.uint64)
        cw = own >> shift
        match = (B >> shift[:, None]) == cw[:, None]
        match[L == 0] = True
        dec = q_order[np.argmax(match[:, q_order], axis=1)]

        lengths[rows[ok]] = L[ok]
        bits_read[rows[ok]] = br[ok]
        decoded[rows[ok]] = dec[ok]

        for r in np.flatnonzero(fallback):
            t = int(rows[r])
            ts = seed.derive_trial(t)
            m_t = int(msgs[t])
            if scheme == ERROR_FREE:
                trace = encode_error_free(m_t, P, alpha, ts)
                cw_t = trace.codeword
                bits_read[t] = trace.stream_bits_read
            else:
                cw_t = encode_positive_error(m_t, P, alpha, epsilon, ts)
                bits_read[t] = cw_t.length
            lengths[t] = cw_t.length
            decoded[t] = decode_max_q(cw_t, Q, ts)

    return msgs, lengths, decoded, bits_read


def summarize(
    P: Distribution,
    scheme: str,
    alpha: float,
    epsilon: float | None,
    lengths: np.ndarray,
    successes: np.ndarray,
) -> SummaryStats:
    trials = lengths.size
    mean_length = float(lengths.mean())
    std = float(lengths.std(ddof=1)) if trials > 1 else 0.0
    length_ci = Z99 * std / math.sqrt(trials)
    err = float(1.0 - successes.mean())
    err_ci = Z99 * math.sqrt(max(err * (1 - err), 0.0) / trials)
    H = entropy(P)
    ell = one_to_one_optimal_length(P)
    if scheme == ERROR_FREE:
        ub = error_free_length_bound(P, alpha)
    else:
        ub = positive_error_length_bound(P, alpha, epsilon)
    return SummaryStats(
        mean_length=mean_length,
        length_ci99=length_ci,
        error_rate=err,
        error_rate_ci=err_ci,
        entropy=H,
        ell_P=ell,
        redundancy=mean_length - ell,
        upper_bound=ub,
        lower_bound_reference=lower_bound_reference(scheme, alpha, epsilon),
    )


def run_experiment(
    config: ExperimentConfig, keep_records: bool = True
) -> ExperimentResult:
    """Run all trials; raises ContractViolationError on any error-free miss."""
    seed = StreamSeed(config.master_seed)
    P, Q, meta = build_instance(config, seed)
    msgs, lengths, decoded, bits_read = _simulate(
        P, Q, config.scheme, config.alpha, config.epsilon, config.trials, seed
    )
    successes = decoded == msgs
    if config.scheme == ERROR_FREE and not successes.all():
        bad = int(np.flatnonzero(~successes)[0])
        raise ContractViolationError(
            f"error-free decode failed at trial {bad}: sent {int(msgs[bad])}, "
            f"got {int(decoded[bad])}"
        )
    summary = summarize(P, config.scheme, config.alpha, config.epsilon, lengths, successes)
    records = []
    if keep_records:
        records = [
            TrialRecord(
                t,
                int(msgs[t]),
                int(lengths[t]),
                int(decoded[t]),
                bool(successes[t]),
                int(bits_read[t]),
            )
            for t in range(config.trials)
        ]
    result = ExperimentResult(
        config, P, Q, meta, summary, records, lengths=lengths, successes=successes
    )
    if config.output_path:
        write_experiment_outputs(result, config.output_path)
    return result


def redundancy_report(
    stats: SummaryStats, alpha: float, epsilon: float | None = None
) -> dict:
    """Measured redundancy next to the proven upper bound and the asymptotic
    lower-bound reference curve (additive constant unknown, reported as 0)."""
    scheme = ERROR_FREE if epsilon is None else POSITIVE_ERROR
    violated = (stats.mean_length - stats.length_ci99) > stats.upper_bound
    return {
        "mean_length": stats.mean_length,
        "length_ci99": stats.length_ci99,
        "redundancy": stats.redundancy,
        "upper_bound": stats.upper_bound,
        "upper_bound_violated": bool(violated),
        "lower_bound_reference": lower_bound_reference(scheme, alpha, epsilon),
        "lower_bound_note": "asymptotic reference curve; unknown additive constant set to 0",
    }


def sweep(
    base_config: ExperimentConfig,
    alphas: list[float],
    epsilons: list[float] | None = None,
) -> list[dict]:
    """One experiment per (alpha, epsilon) grid point, ordered by alpha then
    epsilon.  Per-point failures become failed rows; the sweep continues."""
    if base_config.scheme == POSITIVE_ERROR:
        eps_grid = epsilons if epsilons else [base_config.epsilon]
    else:
        eps_grid = [None]
    seed = StreamSeed(base_config.master_seed)
    rows = []
    for alpha in sorted(alphas):
        for eps in eps_grid:
            label = f"sweep:{alpha!r}:{eps!r}".encode()
            point = base_config.replaced(
                alpha=float(alpha),
                epsilon=eps,
                master_seed=seed.derive(label).hex,
                output_path=None,
            )
            row = {
                "alpha": float(alpha),
                "epsilon": eps,
                "scheme": base_config.scheme,
                "k": "",
                "status": "ok",
            }
            try:
                if base_config.instance.kind == "hard":
                    row["k"] = largest_k(alpha)
                result = run_experiment(point, keep_records=False)
                s = result.summary
                row.update(
                    entropy=s.entropy,
                    ell_P=s.ell_P,
                    mean_length=s.mean_length,
                    length_ci99=s.length_ci99,
                    error_rate=s.error_rate,
                    redundancy=s.redundancy,
                    upper_bound=s.upper_bound,
                )
            except Exception as exc:  # per-point failure, sweep continues
                row["status"] = "failed"
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# File formats (JSON documents and CSV tables)
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def save_json(doc: dict, path: str):
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def load_json(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc


def distribution_to_doc(P: Distribution) -> dict:
    doc = {"probs": [float(x) for x in P.probs]}
    if P.message_set.labels is not None:
        doc["labels"] = list(P.message_set.labels)
    return doc


def distribution_from_doc(doc: dict) -> Distribution:
    if "probs" not in doc:
        raise ConfigError("distribution document missing 'probs'")
    return validate_distribution(doc["probs"], doc.get("labels"))


def instance_pair_from_doc(doc: dict) -> tuple[Distribution, Distribution]:
    if "P" not in doc or "Q" not in doc:
        raise ConfigError("instance document must contain 'P' and 'Q'")
    return distribution_from_doc(doc["P"]), distribution_from_doc(doc["Q"])


def hard_instance_to_doc(inst: HardInstance, seed_hex: str) -> dict:
    return {
        "P": distribution_to_doc(inst.P),
        "Q": distribution_to_doc(inst.Q),
        "meta": {
            "kind": "hard",
            "alpha": inst.alpha,
            "k": inst.k,
            "distinguished_m": inst.distinguished_m,
            "S": list(inst.S),
            "seed": seed_hex,
        },
    }


def codeword_to_doc(c: Codeword) -> dict:
    return {"len": c.length, "bits": c.prefix.bits}


def codeword_from_doc(doc: dict) -> Codeword:
    bits = doc.get("bits", "")
    if doc.get("len") != len(bits):
        raise ConfigError("codeword document: 'len' does not match 'bits'")
    return Codeword(BitPrefix(bits))


def write_records_csv(records: list[TrialRecord], path: str):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["trial_index", "message", "codeword_length", "decoded", "success", "stream_bits_read"]
        )
        for r in records:
            writer.writerow(
                [r.trial_index, r.message, r.codeword_length, r.decoded, int(r.success), r.stream_bits_read]
            )


def write_experiment_outputs(result: ExperimentResult, out_dir: str):
    os.makedirs(out_dir, exist_ok=True)
    doc = {
        "config": result.config.to_dict(),
        "instance": result.meta,
        "summary": result.summary.to_dict(),
        "report": redundancy_report(
            result.summary, result.config.alpha, result.config.epsilon
        ),
    }
    save_json(doc, os.path.join(out_dir, "summary.json"))
    write_records_csv(result.records, os.path.join(out_dir, "records.csv"))


def write_sweep_csv(rows: list[dict], path: str):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in SWEEP_COLUMNS])


def write_sweep_long_csv(rows: list[dict], path: str):
    """Plot-ready long format: one (grid point, metric, value) per line."""
    metrics = SWEEP_COLUMNS[4:]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["alpha", "epsilon", "scheme", "metric", "value"])
        for row in rows:
            for metric in metrics:
                if metric in row:
                    writer.writerow(
                        [
                            _fmt(row["alpha"]),
                            _fmt(row["epsilon"]),
                            row["scheme"],
                            metric,
                            _fmt(row[metric]),
                        ]
                    )
