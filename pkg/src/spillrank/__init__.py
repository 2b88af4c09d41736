"""Succinct rank structures over bit arrays with spillover encoding.

The package turns a bit array into a tree of fixed-arity combined codes whose
total footprint is the information-theoretic minimum plus one bit, supports
rank queries that touch O(t) memory words, and certifies every size bound with
exact integer arithmetic rather than floating-point estimates.
"""

from .model import (
    BitArena,
    CapError,
    Caps,
    CertificationError,
    ConfigError,
    EncodingError,
    IntegrityError,
    ParameterError,
    Params,
    ProbeMeter,
    RangeError,
    SpilloverValue,
    append_bits,
    meter_report,
    read_word,
)

__version__ = "0.1.0"

__all__ = [
    "BitArena",
    "CapError",
    "Caps",
    "CertificationError",
    "ConfigError",
    "EncodingError",
    "IntegrityError",
    "ParameterError",
    "Params",
    "ProbeMeter",
    "RangeError",
    "SpilloverValue",
    "append_bits",
    "meter_report",
    "read_word",
    "__version__",
]
