"""Exception hierarchy for the package.

The CLI maps these onto exit codes: invalid input -> 2, contract
violation (a decode that must not fail, or a proven bound exceeded) -> 3,
instance construction failure -> 4.
"""


class PriorcodeError(Exception):
    """Base class for all package errors."""


class InvalidDistributionError(PriorcodeError, ValueError):
    """A probability vector violates nonnegativity, normalization or labeling."""


class ConfigError(PriorcodeError, ValueError):
    """Malformed experiment configuration or input file."""


class StreamCapExceededError(PriorcodeError, RuntimeError):
    """A codec asked for more shared-randomness bits than the per-message cap."""


class DecodeError(PriorcodeError, RuntimeError):
    """The candidate set is empty; encoder and decoder disagree on the seed."""


class ContractViolationError(PriorcodeError, RuntimeError):
    """An exact guarantee failed: error-free decoding missed, or a bound broke."""


class InstanceConstructionError(PriorcodeError, ValueError):
    """The requested hard instance cannot be built for these parameters."""
