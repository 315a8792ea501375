"""One-shot source coding when sender and receiver hold different priors.

The sender knows the true source distribution P; the receiver only knows a
prior Q guaranteed to be within a multiplicative factor alpha of P.  This
package implements the two shared-randomness schemes that cope with that
mismatch (exact decoding, and decoding with failure probability epsilon),
generators for the worst-case prior pairs that make the overhead necessary,
and a Monte Carlo harness that measures redundancy against the closed-form
bounds.
"""

from .codecs import (
    Codeword,
    EncodeTrace,
    ceil_log2,
    decode_candidates,
    decode_max_q,
    encode_error_free,
    encode_positive_error,
    error_free_length_bound,
    exact_expected_length_positive,
    positive_error_length,
    positive_error_length_bound,
)
from .core import (
    ClosenessReport,
    Distribution,
    MessageSet,
    entropy,
    min_closeness,
    one_to_one_optimal_length,
    relative_entropy,
    validate_distribution,
)
from .errors import (
    ConfigError,
    ContractViolationError,
    DecodeError,
    InstanceConstructionError,
    InvalidDistributionError,
    PriorcodeError,
    StreamCapExceededError,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    InstanceSpec,
    SummaryStats,
    TrialRecord,
    redundancy_report,
    run_experiment,
    summarize,
    sweep,
)
from .instances import (
    HardInstance,
    hard_instance,
    hard_instance_entropy,
    largest_k,
    random_close_pair,
)
from .randomness import STREAM_BIT_CAP, BitPrefix, StreamSeed, stream_bits

__version__ = "0.1.0"

__all__ = [
    "BitPrefix",
    "ClosenessReport",
    "Codeword",
    "ConfigError",
    "ContractViolationError",
    "DecodeError",
    "Distribution",
    "EncodeTrace",
    "ExperimentConfig",
    "ExperimentResult",
    "HardInstance",
    "InstanceConstructionError",
    "InstanceSpec",
    "InvalidDistributionError",
    "MessageSet",
    "PriorcodeError",
    "STREAM_BIT_CAP",
    "StreamCapExceededError",
    "StreamSeed",
    "SummaryStats",
    "TrialRecord",
    "ceil_log2",
    "decode_candidates",
    "decode_max_q",
    "encode_error_free",
    "encode_positive_error",
    "entropy",
    "error_free_length_bound",
    "exact_expected_length_positive",
    "hard_instance",
    "hard_instance_entropy",
    "largest_k",
    "min_closeness",
    "one_to_one_optimal_length",
    "positive_error_length",
    "positive_error_length_bound",
    "random_close_pair",
    "redundancy_report",
    "relative_entropy",
    "run_experiment",
    "stream_bits",
    "summarize",
    "sweep",
    "validate_distribution",
]
