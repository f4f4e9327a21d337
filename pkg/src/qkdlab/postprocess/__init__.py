"""Classical post-processing: parameter estimation, reconciliation, privacy amplification.

The end-to-end session lives in ``qkdlab.postprocess.pipeline``.
"""

from .estimation import (
    PeOutcome,
    PeParams,
    asymptotic_hbound,
    estimate,
    gamma_for_epsilon,
    pe_epsilon,
    sample_subset,
    serfling_tail,
    unrank_subset,
)
from .ldpc import LdpcCode, checks_for_rate, decode, regular_code
from .reconcile import IrResult, reconcile, verification_bits

__all__ = [
    "IrResult",
    "LdpcCode",
    "PeOutcome",
    "PeParams",
    "asymptotic_hbound",
    "checks_for_rate",
    "decode",
    "estimate",
    "gamma_for_epsilon",
    "pe_epsilon",
    "reconcile",
    "regular_code",
    "sample_subset",
    "serfling_tail",
    "unrank_subset",
    "verification_bits",
]
